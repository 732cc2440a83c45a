#!/usr/bin/env python3
"""
FeynLab Setup Script
Run this script to set up your FeynLab environment
"""

import subprocess
import sys
from pathlib import Path


def run_command(command, description):
    """Run a command and handle errors"""
    print(f"🔧 {description}...")
    try:
        subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print(f"✅ {description} completed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Error during {description}: {e}")
        print(f"Output: {e.output}")
        return False


def check_python_version():
    """Check if Python version is compatible"""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 9):
        print("❌ Python 3.9 or higher is required")
        return False
    print(f"✅ Python {version.major}.{version.minor}.{version.micro} detected")
    return True


def create_env_file():
    """Create .env file from template"""
    env_template = """# FeynLab Environment Configuration

# Where logs and result files go
FEYNLAB_LOG_DIR=logs
FEYNLAB_RESULTS_DIR=data/results

# Quadrature defaults (command-line flags override these)
FEYNLAB_DEFAULT_NODES=12
FEYNLAB_DEFAULT_SEED=0

# Worker processes for quadrature-node evaluation
FEYNLAB_JOBS=1
"""

    env_file = Path(".env")
    if not env_file.exists():
        env_file.write_text(env_template)
        print("✅ Created .env file")
    else:
        print("✅ .env file already exists")


def setup_feynlab():
    """Main setup function"""
    print("🚀 Welcome to FeynLab Setup!")
    print("=" * 50)

    if not check_python_version():
        return False

    print("📦 Installing required packages...")
    if not run_command(f"{sys.executable} -m pip install -r requirements.txt", "Installing dependencies"):
        print("💡 Tip: create a virtual environment first")
        return False

    create_env_file()

    for directory in ["data/results", "logs", "graphs"]:
        Path(directory).mkdir(parents=True, exist_ok=True)
        print(f"✅ Created directory: {directory}")

    print("\n🎉 FeynLab setup completed successfully!")
    print("\n📋 Next Steps:")
    print("1. Run the demo: python demo.py")
    print("2. Inspect a graph: python main.py graph-info --graph triangle")
    print("3. Run the checks: python main.py verify --suite kirchhoff")
    return True


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build frontend (pip, setuptools); metadata lives in pyproject.toml
        from setuptools import setup
        setup()
    else:
        setup_feynlab()

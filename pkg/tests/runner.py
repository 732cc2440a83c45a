"""
Standalone runner shared by the test modules (python tests/test_graphs.py)
"""

import traceback


class TestResults:
    """Track test results"""
    __test__ = False

    def __init__(self):
        self.passed = 0
        self.failed = 0
        self.total = 0
        self.errors = []

    def add_result(self, test_name: str, success: bool, error: str = None):
        self.total += 1
        if success:
            self.passed += 1
            print(f"✅ {test_name} - PASSED")
        else:
            self.failed += 1
            self.errors.append(f"{test_name}: {error}")
            print(f"❌ {test_name} - FAILED: {error}")

    def summary(self):
        print(f"\n📊 Test Summary: {self.passed}/{self.total} tests passed")
        if self.errors:
            print("\n❌ Errors:")
            for error in self.errors:
                print(f"  • {error}")


def _cases(func):
    """Keyword sets for one test function, expanding @pytest.mark.parametrize."""
    cases = [{}]
    for mark in getattr(func, "pytestmark", []):
        if mark.name != "parametrize":
            continue
        names, values = mark.args[0], mark.args[1]
        names = [n.strip() for n in names.split(",")] if isinstance(names, str) else list(names)
        rows = [v if len(names) > 1 else (v,) for v in values]
        cases = [{**case, **dict(zip(names, row))} for case in cases for row in rows]
    return cases


def run_module(title: str, namespace: dict) -> bool:
    """Run every test_* function of a module outside pytest.

    Parametrized tests run once per case; tests taking a tmp_path argument get
    a fresh temporary directory.
    """
    import inspect
    import tempfile
    from pathlib import Path

    print(f"🚀 {title}")
    print("=" * 60)
    results = TestResults()
    for name, func in sorted(namespace.items()):
        if not name.startswith("test_") or not callable(func):
            continue
        for case in _cases(func):
            kwargs = dict(case)
            if "tmp_path" in inspect.signature(func).parameters:
                kwargs["tmp_path"] = Path(tempfile.mkdtemp(prefix="feynlab-"))
            label = name if not case else f"{name}[{'-'.join(map(str, case.values()))}]"
            try:
                func(**kwargs)
                results.add_result(label, True)
            except Exception as e:
                results.add_result(label, False, f"{type(e).__name__}: {e}")
                traceback.print_exc()
    results.summary()
    return results.failed == 0

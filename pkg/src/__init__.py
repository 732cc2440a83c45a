# FeynLab Source Package 
ARTIFACT_NAME = "qsnn-lab"
__version__ = "0.1.0"

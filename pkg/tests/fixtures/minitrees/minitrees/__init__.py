"""Tree and decomposition models used as a generation fixture."""

from minitrees.trees import PCA, DecisionTreeClassifier, LogisticRegression

__all__ = ["DecisionTreeClassifier", "LogisticRegression", "PCA"]

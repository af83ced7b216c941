"""Linear and kernel models, second release."""


class Ridge:
    """Linear least squares with L2 regularization."""

    def __init__(self, alpha=1.0, fit_intercept=True, positive=False):
        self.alpha = alpha
        self.fit_intercept = fit_intercept
        self.positive = positive

    def fit(self, X, y):
        """Fit the model."""
        _helper(X)
        return self


class Lasso:
    """Linear model with L1 prior.

    .. deprecated:: 0.2
        Use `minilearn.models.ElasticNet` instead. Will be removed in 0.4.
    """

    def __init__(self, alpha=1.0, copy_X=True, max_iter=1000, positive=False):
        self.alpha = alpha
        self.copy_X = copy_X
        self.max_iter = max_iter
        self.positive = positive


class ElasticNet:
    """Linear model mixing L1 and L2 priors."""

    def __init__(self, alpha=1.0, l1_ratio=0.5):
        self.alpha = alpha
        self.l1_ratio = l1_ratio

    def fit(self, X, y):
        """Fit the model."""
        _helper(X)
        return self


def _helper(arrays):
    """Internal validation helper."""
    return arrays

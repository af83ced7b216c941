"""Private implementation module; only re-exported names are public."""


def transform(data, scale=1.0):
    """Scale every entry."""
    return [x * scale for x in data]


def _check(data):
    return list(data)

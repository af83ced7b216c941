"""Legacy numeric helpers, written to exercise deprecation mining.

Every deprecation wording that the miner understands appears somewhere
in this module: docstring directives with and without bodies, decorator
forms, and plain prose sentences. A few functions are intentionally not
deprecated, or use wording the miner must ignore.
"""


def rolling_sum(values, window=3):
    """Summed sliding window over a sequence.

    .. deprecated:: 1.2
    """
    return values


def widget_count(items):
    """Count assembled widgets.

    .. deprecated:: 1.0
        Use deplib.count_items instead.
        Will be removed in 2.0.
    """
    return len(items)


def scale_values(values, factor=1.0):
    """Scale values linearly.

    .. deprecated:: 0.5
        Use `deplib.rescale` instead.
    """
    return [v * factor for v in values]


def legacy_solver(matrix):
    """Direct dense solver.

    .. deprecated:: 1.1
        Will be removed in version 3.0.
    """
    return matrix


def vector_norm(vector):
    """Euclidean norm.

    .. deprecated:: 0.9.1
        This barely handles empty input.

        Use deplib.norm2 instead and it will be removed in v1.2.
    """
    return sum(x * x for x in vector) ** 0.5


def read_entries(path):
    """Read entries from disk.

    .. deprecated:: 2.0
        Use deplib.load_entries instead.

    The old on-disk format was removed in 9.9 of the format sheet, which
    is unrelated to this function's own removal schedule.
    """
    return path


def flatten_rows(rows):
    """Flatten nested rows.

    .. deprecated::
        Use deplib.flatten instead.
    """
    return [x for row in rows for x in row]


@deprecated('9.9')
def merge_tables(left, right):
    """Merge two keyed tables.

    .. deprecated:: 1.4
    """
    return left, right


@deprecated
def apply_filter(rows, predicate):
    """Apply the configured filter to every row."""
    return [r for r in rows if predicate(r)]


@deprecated("1.5")
def fill_gaps(series):
    """Forward-fill missing entries."""
    return series


@_compat.deprecated("2.0", "use deplib.windows instead")
def span_windows(series, width):
    """Spanning windows of fixed width."""
    return series, width


@deprecated(reason="use deplib.clip_edges instead")
def trim_edges(series, amount=1):
    """Drop leading and trailing entries."""
    return series[amount:-amount]


@deprecated("soon")
def pack_bits(flags):
    """Pack booleans into an integer."""
    return sum(1 << i for i, f in enumerate(flags) if f)


@deprecate
def mask_rows(rows, mask):
    """Mask selected rows."""
    return [r for r, keep in zip(rows, mask) if keep]


@deprecated("3.1")
def join_paths(head, tail):
    """Deprecated since version 0.1. Use deplib.combine_paths instead."""
    return head + "/" + tail


def split_chunks(values, size):
    """Split into fixed-size chunks. This helper is deprecated since version 1.3."""
    return [values[i:i + size] for i in range(0, len(values), size)]


def order_keys(mapping):
    """Deprecated since 0.8 and will be removed in version 1.0.

    Use `deplib.sort_keys` instead.
    """
    return sorted(mapping)


def drop_nulls(values):
    """Will be removed in 2.1 during the storage cleanup."""
    return [v for v in values if v is not None]


def stack_frames(frames):
    """This API is deprecated; use deplib.pile_frames instead."""
    return list(frames)


def mean_ratio(pairs):
    """Arithmetic mean of pairwise ratios."""
    return sum(a / b for a, b in pairs) / len(pairs)

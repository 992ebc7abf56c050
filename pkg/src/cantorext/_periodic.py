"""Canonical forms for eventually periodic sequences ``prefix + cycle^inf``."""


def canonical(prefix, cycle, min_prefix=0, period_multiple=1):
    """Return the shortest (prefix, cycle) pair describing the same sequence.

    The cycle is reduced to its primitive period (kept a multiple of
    ``period_multiple``) and trailing prefix entries are rolled into the cycle
    while the prefix stays at least ``min_prefix`` long.
    """
    prefix = tuple(prefix)
    cycle = tuple(cycle)
    if not cycle:
        raise ValueError("empty cycle")
    p = len(cycle)
    for q in range(period_multiple, p + 1, period_multiple):
        if p % q == 0 and cycle == cycle[:q] * (p // q):
            cycle = cycle[:q]
            break
    while len(prefix) > min_prefix and prefix[-1] == cycle[-1]:
        cycle = (prefix[-1],) + cycle[:-1]
        prefix = prefix[:-1]
    return prefix, cycle


def item(prefix, cycle, i):
    """Entry ``i`` (0-based) of ``prefix + cycle + cycle + ...``."""
    if i < len(prefix):
        return prefix[i]
    return cycle[(i - len(prefix)) % len(cycle)]


def take(prefix, cycle, n):
    return tuple(item(prefix, cycle, i) for i in range(n))


def advance(prefix, cycle, n):
    """Materialize the first ``n`` entries into the prefix, rotating the cycle."""
    if n <= len(prefix):
        return tuple(prefix), tuple(cycle)
    extra = n - len(prefix)
    r = extra % len(cycle)
    return tuple(prefix) + take((), cycle, extra), tuple(cycle[r:] + cycle[:r])


def first_difference(a, b):
    """Index of the first entry where two eventually periodic sequences differ, or None."""
    (pa, ca), (pb, cb) = a, b
    bound = max(len(pa), len(pb)) + len(ca) * len(cb)
    for i in range(bound):
        if item(pa, ca, i) != item(pb, cb, i):
            return i
    return None

"""Random test inputs shared by the unit and acceptance suites."""

from fractions import Fraction


def random_partition(rng, n):
    parts = []
    left = n
    while left:
        k = rng.randint(1, left)
        parts.append(k)
        left -= k
    return parts


def random_nilpotent(rng, n):
    """A conjugate of a random nilpotent Jordan form, as Fraction rows."""
    jordan = [[Fraction(0)] * n for _ in range(n)]
    start = 0
    for k in random_partition(rng, n):
        for i in range(start, start + k - 1):
            jordan[i][i + 1] = Fraction(1)
        start += k
    # g = lower unitriangular * upper unitriangular, inverse computed exactly
    lower = [[Fraction(int(i == j)) if i <= j else Fraction(rng.randint(-3, 3)) for j in range(n)] for i in range(n)]
    lower = [[lower[i][j] if j <= i else Fraction(0) for j in range(n)] for i in range(n)]
    upper = [[Fraction(int(i == j)) if i >= j else Fraction(rng.randint(-3, 3)) for j in range(n)] for i in range(n)]
    g = _mul(lower, upper)
    return _mul(_mul(g, jordan), _inverse(g))


def _mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _inverse(a):
    n = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]

"""Constants profiles: every threshold the oracle and router run on.

All rational thresholds are exact `Fraction`s and every derived cap is
integer arithmetic, so profiles are reproducible bit for bit. Two entry
points exist: `derive_profile` computes the canonical formulas (and, in
strict mode, enforces the regime they are proved for), while
`desk_profile` produces a relaxed profile tuned to keep the machinery
live on desk-scale random graphs, where the canonical constants
degenerate (see the field comments).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CallerError, FormatError


def ceil_log2(n: int) -> int:
    if n < 1:
        raise CallerError("ceil_log2 needs n >= 1")
    return (n - 1).bit_length()


def frac_floor(x: Fraction) -> int:
    return math.floor(x)


def frac_ceil(x: Fraction) -> int:
    return math.ceil(x)


@dataclass(frozen=True)
class OracleProfile:
    """Thresholds for one edge-oracle instance over a d-regular host."""

    n: int
    d: int
    out_cap: int            # hard out-degree cap in H u B; canonical floor(d/2)
    in_cap: int             # hard in-degree cap in H u B; canonical floor(d/5)
    sat_threshold: Fraction  # in-degree at which a head saturates; canonical d/10
    low_threshold: Fraction  # saturated out-neighbourhood that triggers buffering; canonical d/4
    capacity: int           # adds are refused once |H| reaches this
    beta: Fraction
    gamma: Fraction
    relaxed: bool = False

    def __post_init__(self):
        if self.d < 10 and not self.relaxed:
            raise CallerError("oracle host degree %d < 10 requires a relaxed profile" % self.d)
        if self.gamma > Fraction(1, 50) and not self.relaxed:
            raise CallerError("oracle gamma > 1/50 requires a relaxed profile")


def canonical_oracle_profile(n, d, beta, gamma, relaxed=False, capacity=None):
    beta = Fraction(beta)
    gamma = Fraction(gamma)
    if capacity is None:
        capacity = frac_floor(beta * d * n / 120)
    return OracleProfile(
        n=n,
        d=d,
        out_cap=d // 2,
        in_cap=d // 5,
        sat_threshold=Fraction(d, 10),
        low_threshold=Fraction(d, 4),
        capacity=capacity,
        beta=beta,
        gamma=gamma,
        relaxed=relaxed,
    )


@dataclass(frozen=True)
class RouterProfile:
    """Full constants set for the routing engine.

    `d` is the degree of the undirected input, `k` the degree of its
    orientation, `d_prime` the degree of the two oracle hosts.
    """

    n: int
    d: int
    beta: Fraction
    gamma: Fraction
    relaxed: bool
    k: int
    d_prime: int
    c: Fraction               # beta / 1200
    depth_cap: int            # BFS tree depth budget, ceil(log2 n) by default
    bfs_vertex_cap: int       # tree growth stops past this many vertices
    bfs_edge_cap: int         # tree growth stops at this many edges
    fanout: int               # oracle requests per dequeued vertex
    endpoint_cap: int         # a vertex may start (end) strictly fewer paths
    r: int                    # live-path volume cap
    g3_path_cap: int          # max accepted length of the middle segment
    path_len_cap: int         # max accepted total path length
    h_size_cap: int           # upper bound verified on |H1|, |H2|
    oracle_out_cap: int
    oracle_in_cap: int
    oracle_sat_threshold: Fraction
    oracle_low_threshold: Fraction
    oracle_capacity: int

    def oracle_profile(self) -> OracleProfile:
        """Profile for the two d_prime-regular oracle hosts."""
        return OracleProfile(
            n=self.n,
            d=self.d_prime,
            out_cap=self.oracle_out_cap,
            in_cap=self.oracle_in_cap,
            sat_threshold=self.oracle_sat_threshold,
            low_threshold=self.oracle_low_threshold,
            capacity=self.oracle_capacity,
            beta=self.beta,
            gamma=self.gamma,
            relaxed=self.relaxed,
        )

    def capacity_chains_hold(self) -> bool:
        """The two inequalities a strict profile must satisfy."""
        lg = ceil_log2(self.n)
        first = self.r * lg <= self.c * self.n * self.k / 2
        second = Fraction(300, 1) / self.beta * self.r <= self.beta * self.n * self.k / 50
        return bool(first and second)


def oriented_degree(d: int) -> int:
    return d // 2 if d % 2 == 0 else (d - 1) // 2


def derive_profile(n, d, beta, gamma, relaxed=False, lam=None, c0=1):
    """Compute every derived constant from (n, d, beta, gamma).

    Strict mode (relaxed=False) enforces gamma < 1/1000 and d > 200.
    Passing `lam` switches the depth budget to the spectral variant
    ceil(log n / log(c0 * d^2 / lam^2)) and rescales r with it.
    """
    beta = Fraction(beta)
    gamma = Fraction(gamma)
    if not (0 < beta < 1):
        raise CallerError("beta must lie in (0, 1)")
    if not (0 < gamma < 1):
        raise CallerError("gamma must lie in (0, 1)")
    if not relaxed:
        if gamma >= Fraction(1, 1000):
            raise CallerError("strict profiles need gamma < 1/1000")
        if d <= 200:
            raise CallerError("strict profiles need d > 200")
    if d < 20:
        raise CallerError("need d >= 20 so that d_prime >= 1 (got d=%d)" % d)
    k = oriented_degree(d)
    d_prime = k // 10
    if d_prime < 1:
        raise CallerError("d_prime would be 0 for d=%d" % d)
    c = beta / 1200
    lg = ceil_log2(n)
    depth_cap = lg
    if lam is not None:
        growth = c0 * d * d / (lam * lam)
        if growth <= 1:
            raise CallerError("spectral depth budget needs c0*d^2/lam^2 > 1")
        depth_cap = max(1, math.ceil(math.log(n) / math.log(growth)))
    r = min(
        frac_floor(c * n * k / (2 * depth_cap)),
        frac_floor(beta * beta * n * k / 15000),
    )
    bfs_edge_cap = frac_floor(c * n * k / 2)
    g3_path_cap = frac_ceil(Fraction(300, 1) / beta) + 1
    profile = RouterProfile(
        n=n,
        d=d,
        beta=beta,
        gamma=gamma,
        relaxed=relaxed,
        k=k,
        d_prime=d_prime,
        c=c,
        depth_cap=depth_cap,
        bfs_vertex_cap=frac_ceil(beta * n / 5),
        bfs_edge_cap=bfs_edge_cap,
        fanout=d_prime // 4,
        endpoint_cap=frac_ceil(Fraction(d, 200)),
        r=r,
        g3_path_cap=g3_path_cap,
        path_len_cap=2 * lg + g3_path_cap,
        h_size_cap=bfs_edge_cap,
        oracle_out_cap=d_prime // 2,
        oracle_in_cap=d_prime // 5,
        oracle_sat_threshold=Fraction(d_prime, 10),
        oracle_low_threshold=Fraction(d_prime, 4),
        oracle_capacity=frac_floor(beta * d_prime * n / 120),
    )
    if not relaxed and not profile.capacity_chains_hold():
        raise CallerError("derived r violates a capacity chain (internal)")
    return profile


def desk_profile(n, d, **overrides):
    """Relaxed profile tuned for desk-scale runs on random regular graphs.

    The canonical constants collapse below d ~ 200: d_prime = floor(k/10)
    drops under 10, the saturation threshold d_prime/10 falls below one
    edge (so every used head saturates and buffering cascades), and the
    derived r rounds to zero. This profile keeps the structural ratios
    that make the machinery live instead: d_prime around 2k/5 but at
    least 6, an out cap near d_prime/2 (so buffered vertices still have
    free forward edges for their walks), absolute saturation and in caps
    of 2, and out_cap >= in_cap + endpoint_cap so a request's endpoints
    always have tree-growing headroom. Load caps were tuned on seeded
    runs; any field can be overridden by keyword.
    """
    if d < 26:
        raise CallerError("desk routing profiles need d >= 26 (got %d)" % d)
    k = oriented_degree(d)
    d_prime = max(6, (2 * k) // 5)
    if k - 2 * d_prime < 2:
        d_prime = (k - 2) // 2
    out_cap = max(3, d_prime // 2)
    in_cap = max(2, d_prime // 5)
    endpoint_cap = max(1, min(3, out_cap - in_cap - 1))
    bfs_vertex_cap = max(6, -(-n // 50))
    depth_cap = ceil_log2(n)
    g3_path_cap = 50
    r = max(8, n // 25)
    beta = Fraction(5 * bfs_vertex_cap, n)
    profile = RouterProfile(
        n=n,
        d=d,
        beta=beta,
        gamma=Fraction(1, 50),
        relaxed=True,
        k=k,
        d_prime=d_prime,
        c=beta / 1200,
        depth_cap=depth_cap,
        bfs_vertex_cap=bfs_vertex_cap,
        bfs_edge_cap=6 * bfs_vertex_cap,
        fanout=2,
        endpoint_cap=endpoint_cap,
        r=r,
        g3_path_cap=g3_path_cap,
        path_len_cap=2 * depth_cap + g3_path_cap,
        h_size_cap=r * depth_cap,
        oracle_out_cap=out_cap,
        oracle_in_cap=in_cap,
        oracle_sat_threshold=Fraction(max(2, d_prime // 10)),
        # trigger buffering exactly when free unsaturated out-edges could
        # run out; earlier triggering (the canonical d'/4) over-buffers at
        # desk load and the buffer growth feeds back into saturation
        oracle_low_threshold=Fraction(d_prime - out_cap),
        oracle_capacity=n * in_cap,
    )
    if overrides:
        profile = dataclasses.replace(profile, **overrides)
    return profile


# --- profile files (key=value, one field per line) --------------------------

_FRACTION_FIELDS = ("beta", "gamma", "c", "oracle_sat_threshold", "oracle_low_threshold")
_BOOL_FIELDS = ("relaxed",)


def format_profile(profile: RouterProfile) -> str:
    lines = []
    for field in dataclasses.fields(profile):
        value = getattr(profile, field.name)
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, Fraction):
            text = "%d/%d" % (value.numerator, value.denominator)
        else:
            text = str(value)
        lines.append("%s=%s" % (field.name, text))
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> RouterProfile:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError("profile line %d: expected key=value" % lineno)
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    field_names = {f.name for f in dataclasses.fields(RouterProfile)}
    missing = field_names - values.keys()
    if missing:
        raise FormatError("profile missing fields: %s" % ", ".join(sorted(missing)))
    unknown = values.keys() - field_names
    if unknown:
        raise FormatError("profile has unknown fields: %s" % ", ".join(sorted(unknown)))
    kwargs = {}
    for name, raw in values.items():
        try:
            if name in _BOOL_FIELDS:
                if raw not in ("true", "false"):
                    raise ValueError(raw)
                kwargs[name] = raw == "true"
            elif name in _FRACTION_FIELDS:
                kwargs[name] = Fraction(raw)
            else:
                kwargs[name] = int(raw)
        except (ValueError, ZeroDivisionError):
            raise FormatError("profile field %s: bad value %r" % (name, raw)) from None
    return RouterProfile(**kwargs)


def load_profile(path) -> RouterProfile:
    with open(path, "r", encoding="ascii") as fh:
        return parse_profile(fh.read())


def save_profile(path, profile: RouterProfile):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_profile(profile))

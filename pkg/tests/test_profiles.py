import math
from fractions import Fraction

import pytest

from expander_routing.errors import CallerError
from expander_routing.profiles import (
    RouterProfile,
    canonical_oracle_profile,
    ceil_log2,
    derive_profile,
    desk_profile,
    format_profile,
    parse_profile,
)


def test_ceil_log2():
    assert ceil_log2(1) == 0
    assert ceil_log2(2) == 1
    assert ceil_log2(600) == 10
    assert ceil_log2(1024) == 10
    assert ceil_log2(1025) == 11


def test_strict_profile_worked_example():
    # independent re-evaluation of every derived field at n=1024, d=400
    n, d = 1024, 400
    beta = Fraction(1, 100)
    gamma = Fraction(1, 2000)
    p = derive_profile(n, d, beta, gamma)
    k = 200
    assert p.k == k
    assert p.d_prime == 20
    assert p.c == beta / 1200
    lg = 10
    first = math.floor((beta / 1200) * n * k / (2 * lg))
    second = math.floor(beta * beta * n * k / 15000)
    assert p.r == min(first, second)
    assert p.bfs_vertex_cap == math.ceil(beta * n / 5)
    assert p.bfs_edge_cap == math.floor((beta / 1200) * n * k / 2)
    assert p.fanout == 5
    assert p.endpoint_cap == 2  # strictly fewer than 400/200 paths per endpoint
    assert p.g3_path_cap == math.ceil(300 / beta) + 1
    assert p.path_len_cap == 2 * lg + p.g3_path_cap
    assert p.oracle_out_cap == 10
    assert p.oracle_in_cap == 4
    assert p.oracle_sat_threshold == Fraction(2)
    assert p.oracle_low_threshold == Fraction(5)
    assert p.oracle_capacity == math.floor(beta * 20 * n / 120)
    assert p.capacity_chains_hold()


def test_strict_profile_rejects_large_gamma():
    with pytest.raises(CallerError):
        derive_profile(1024, 400, "1/100", "1/500")


def test_strict_profile_rejects_small_degree():
    with pytest.raises(CallerError):
        derive_profile(1024, 19, "1/100", "1/2000", relaxed=True)
    with pytest.raises(CallerError):
        derive_profile(1024, 150, "1/100", "1/2000")  # strict needs d > 200


def test_relaxed_profile_allows_small_degree():
    p = derive_profile(100, 20, "1/10", "1/50", relaxed=True)
    assert p.k == 10
    assert p.d_prime == 1
    assert p.relaxed


def test_spectral_variant_shrinks_depth_budget():
    base = derive_profile(10**6, 400, "1/100", "1/2000")
    spectral = derive_profile(10**6, 400, "1/100", "1/2000", lam=20.0)
    assert spectral.depth_cap < base.depth_cap
    growth = 400 * 400 / (20.0 * 20.0)
    assert spectral.depth_cap == math.ceil(math.log(10**6) / math.log(growth))
    assert spectral.r >= base.r


def test_profile_file_round_trip():
    p = derive_profile(2048, 400, "1/100", "1/2000")
    assert parse_profile(format_profile(p)) == p
    q = desk_profile(600, 30)
    assert parse_profile(format_profile(q)) == q


def test_profile_file_rejects_missing_field():
    text = format_profile(desk_profile(600, 30))
    broken = "\n".join(text.splitlines()[1:])
    with pytest.raises(Exception):
        parse_profile(broken)


def test_desk_profile_structure():
    p = desk_profile(600, 30)
    assert p.relaxed
    assert p.d_prime >= 6
    assert p.k - 2 * p.d_prime >= 2
    assert p.fanout >= 2
    # endpoints must always be able to start growing a tree
    assert p.oracle_out_cap >= p.oracle_in_cap + p.endpoint_cap
    assert p.bfs_vertex_cap == math.ceil(p.beta * p.n / 5)
    op = p.oracle_profile()
    assert op.d == p.d_prime
    assert op.out_cap == p.oracle_out_cap


def test_desk_profile_overrides():
    p = desk_profile(600, 30, r=5, g3_path_cap=99)
    assert p.r == 5
    assert p.g3_path_cap == 99


def test_desk_profile_needs_room():
    with pytest.raises(CallerError):
        desk_profile(600, 20)


def test_oracle_profile_gamma_guard():
    with pytest.raises(CallerError):
        canonical_oracle_profile(300, 20, 1, Fraction(1, 10))
    assert canonical_oracle_profile(300, 20, 1, Fraction(1, 10), relaxed=True)


def test_endpoint_cap_reading():
    # strictly fewer than d/200 path starts, rounding up the rational cap
    assert derive_profile(10**6, 400, "1/100", "1/2000").endpoint_cap == 2
    assert derive_profile(10**6, 300, "1/100", "1/2000").endpoint_cap == 2
    assert derive_profile(10**6, 201, "1/100", "1/2000").endpoint_cap == 2


def test_router_profile_is_complete():
    import dataclasses

    p = desk_profile(600, 30)
    text = format_profile(p)
    for field in dataclasses.fields(RouterProfile):
        assert any(line.startswith(field.name + "=") for line in text.splitlines())

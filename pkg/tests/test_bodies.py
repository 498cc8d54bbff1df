import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from illume.bodies import SymBody, distance_to_cube, is_cube, norm_eval, parse_body, serialize_body
from illume.exceptions import BodyParseError, DimensionError, InvariantError

from conftest import oracle_norm

F = Fraction

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)

SUITE3 = [
    SymBody.cube(3),
    SymBody.ell1(3),
    SymBody.topk(3, 2),
    SymBody.cube_cap_l1(3, F(3, 2)),
    SymBody.cube_cap_l1(3, 2),
    SymBody.dual_orbit(3, [[3, 2, 1], [2, 2, 2]]),
]


class TestParse:
    def test_dual_orbit_record_is_topk(self):
        b = parse_body('{"n":3,"family":"dual_orbit","weights":[["1","1","0"]]}')
        assert b == SymBody.topk(3, 2)
        assert b.n == 3

    def test_unsorted_row_rejected(self):
        with pytest.raises(InvariantError):
            parse_body('{"n":3,"family":"dual_orbit","weights":[["0","1","1"]]}')

    def test_cube_cap_l1_expansion(self):
        b = parse_body({"n": 3, "family": "cube_cap_l1", "r": "2"})
        assert b.weights == ((1, 0, 0), (F(1, 2), F(1, 2), F(1, 2)))

    @pytest.mark.parametrize(
        "text, exc",
        [
            ('{"n":3,"family":"dual_orbit","weights":[["1/0","0","0"]]}', BodyParseError),
            ('{"n":3,"family":"dual_orbit","weights":[["x","0","0"]]}', BodyParseError),
            ('{"n":3,"family":"dual_orbit","weights":[["1","-1","-2"]]}', InvariantError),
            ('{"n":3,"family":"dual_orbit","weights":[["0","0","0"]]}', InvariantError),
            ('{"n":3,"family":"dual_orbit","weights":[["1","1"]]}', DimensionError),
            ('{"n":3,"family":"dual_orbit","weights":[]}', InvariantError),
            ('{"n":1,"family":"cube"}', InvariantError),
            ('{"n":3,"family":"hexagon"}', BodyParseError),
            ('{"n":3,"family":"cube","extra":1}', BodyParseError),
            ('{"n":3,"family":"lp","p":"1/2"}', InvariantError),
            ("not json", BodyParseError),
        ],
    )
    def test_errors(self, text, exc):
        with pytest.raises(exc):
            parse_body(text)

    def test_normalization_scales_first_entry(self):
        b = SymBody.dual_orbit(3, [[4, 2, 0], [2, 2, 2]])
        assert max(r[0] for r in b.weights) == 1
        assert norm_eval(b, [1, 0, 0]) == 1

    def test_lp_endpoints_become_polyhedral(self):
        assert SymBody.lp(4, 1) == SymBody.ell1(4)
        assert SymBody.lp(4, "inf") == SymBody.cube(4)
        assert not SymBody.lp(4, "3/2").polyhedral

    @pytest.mark.parametrize("body", SUITE3 + [SymBody.lp(5, F(7, 3))])
    def test_round_trip(self, body):
        text = serialize_body(body)
        assert parse_body(text) == body
        assert serialize_body(parse_body(text)) == text
        json.loads(text)


class TestNormEval:
    def test_ell1(self):
        assert norm_eval(SymBody.ell1(3), [1, 1, 1]) == 3

    def test_cube(self):
        assert norm_eval(SymBody.cube(3), [F(1, 2), F(-1, 4), 0]) == F(1, 2)

    def test_topk_against_orbit_oracle(self):
        b = SymBody.topk(3, 2)
        assert norm_eval(b, [3, -1, 2]) == 5
        assert oracle_norm(b, [3, -1, 2]) == 5

    @pytest.mark.parametrize("body", SUITE3)
    @given(x=st.lists(rationals, min_size=3, max_size=3))
    @settings(max_examples=40, deadline=None)
    def test_rearrangement_form_matches_orbit(self, body, x):
        assert norm_eval(body, x) == oracle_norm(body, x)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            norm_eval(SymBody.cube(3), [1, 2])

    def test_lp_value(self):
        assert norm_eval(SymBody.lp(2, 2), [3, 4]) == pytest.approx(5.0, rel=1e-15)


class TestDistance:
    @pytest.mark.parametrize("n", [2, 3, 7])
    def test_cube(self, n):
        assert distance_to_cube(SymBody.cube(n)) == 1
        assert is_cube(SymBody.cube(n))

    def test_ell1(self):
        assert distance_to_cube(SymBody.ell1(5)) == 5

    def test_cube_cap(self):
        assert distance_to_cube(SymBody.cube_cap_l1(3, 2)) == F(3, 2)

    def test_redundant_cap_is_cube(self):
        # ||x||_1 <= 3 is implied by the cube when n = 2
        assert is_cube(SymBody.cube_cap_l1(2, 3))

    @pytest.mark.parametrize("body", SUITE3[1:])
    def test_non_cube_distance_above_one(self, body):
        assert distance_to_cube(body) > 1


@pytest.mark.parametrize("body", SUITE3)
class TestNormAxioms:
    @given(x=st.lists(rationals, min_size=3, max_size=3), lam=rationals)
    @settings(max_examples=60, deadline=None)
    def test_homogeneity(self, body, x, lam):
        assert norm_eval(body, [lam * a for a in x]) == abs(lam) * norm_eval(body, x)

    @given(x=st.lists(rationals, min_size=3, max_size=3), z=st.lists(rationals, min_size=3, max_size=3))
    @settings(max_examples=60, deadline=None)
    def test_triangle(self, body, x, z):
        assert norm_eval(body, [a + b for a, b in zip(x, z)]) <= norm_eval(body, x) + norm_eval(body, z)

    @given(
        x=st.lists(rationals, min_size=3, max_size=3),
        perm=st.permutations(range(3)),
        signs=st.lists(st.sampled_from((-1, 1)), min_size=3, max_size=3),
    )
    @settings(max_examples=60, deadline=None)
    def test_symmetry(self, body, x, perm, signs):
        assert norm_eval(body, [s * x[p] for s, p in zip(signs, perm)]) == norm_eval(body, x)

    @given(x=st.lists(rationals, min_size=3, max_size=3), pad=st.lists(rationals, min_size=3, max_size=3))
    @settings(max_examples=60, deadline=None)
    def test_monotone(self, body, x, pad):
        z = [a + (1 if a >= 0 else -1) * abs(b) for a, b in zip(x, pad)]
        assert norm_eval(body, x) <= norm_eval(body, z)

    def test_normalization(self, body):
        assert norm_eval(body, [1, 0, 0]) == 1

    def test_dominates_sup_norm(self, body):
        for x in ([1, 2, 3], [F(1, 3), 0, -5], [1, 1, 1]):
            assert norm_eval(body, x) >= max(abs(a) for a in x)

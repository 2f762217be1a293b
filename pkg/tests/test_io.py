import numpy as np
import pytest
from hypothesis import given

from regdae.errors import ParseError
from regdae.io import json_dumps, parse_pencil, pencil_to_json, trajectory_csv
from regdae.solvers import Trajectory

from conftest import regular_pencils


def test_real_shorthand_and_pairs():
    p = parse_pencil('{"n": 2, "m0": [[1, 0], [0, 0]], "m1": [[[3, 0], 1], [2, [1, -0.5]]]}')
    np.testing.assert_array_equal(p.m0, np.diag([1.0, 0.0]))
    assert p.m1[1, 1] == 1 - 0.5j and p.m1[0, 0] == 3


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"n": 2, "m0": [[1, 0]', "line 1"),
        ('{"n": 2, "m0": [[1, 0], [0, 0]]}', "missing field 'm1'"),
        ('{"n": 2, "m0": [[1, 0], [0, 0]], "m1": [[1, 0, 0], [0, 1]]}', "row 0"),
        ('{"n": 2, "m0": [[1, 0]], "m1": [[1, 0], [0, 1]]}', "expected 2 rows"),
        ('{"n": 1, "m0": [["x"]], "m1": [[1]]}', "entry [0][0]"),
        ('{"n": 0, "m0": [], "m1": []}', "field 'n'"),
        ("[1, 2]", "top level"),
    ],
)
def test_parse_errors_carry_context(text, fragment):
    with pytest.raises(ParseError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        parse_pencil(text)


@given(regular_pencils(max_n=5))
def test_pencil_json_round_trip(p):
    assert parse_pencil(pencil_to_json(p)) == p


def test_json_is_deterministic_and_finite():
    text = json_dumps({"b": -0.0, "a": float("-inf"), "c": np.array([1 + 2j])})
    assert text == json_dumps({"a": float("-inf"), "c": np.array([1 + 2j]), "b": -0.0})
    assert '"a": null' in text and "-0.0" not in text


def test_trajectory_csv_format():
    traj = Trajectory(np.array([0.0, 1.0]), np.array([[1.0 + 0j], [np.exp(-1) - 2j]]), "mild")
    lines = trajectory_csv(traj).splitlines()
    assert lines[0] == "t,re(u_1),im(u_1)"
    assert lines[2] == "1,0.36787944117144233,-2"

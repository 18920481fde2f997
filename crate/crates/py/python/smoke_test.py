"""Quick check that the extension imports and agrees with known values."""

import json

import quadflt


def main():
    phi = quadflt.QuadElement(1, 1, 5, half=True)
    assert str(phi.norm()) == "(-1, 1)", phi.norm()
    assert phi.is_s_unit()
    assert str(quadflt.lambda_to_j(phi)) == "2048"

    assert quadflt.splitting_of_two(17)[0] == "split"
    assert quadflt.theorem1_class(3) == "Theorem 1(i)"
    assert quadflt.theorem1_class(5) is None

    v = quadflt.verdict(3)
    assert v.outcome == "holds_unconditional" and v.holds, v
    v = quadflt.verdict(5)
    assert v.outcome == "criterion_fails"
    assert sorted(v.ord_lambda_mu()) == [0, 1, 2]
    assert quadflt.verdict(13).es_dependent

    assert len(quadflt.relevant_solutions(2)) == 4

    f = quadflt.frey_invariants(1, 1, -2)
    assert f["j"] == "1728" and f["disc"] == "64"

    count, predicted = quadflt.sf_count_in_ap(5, 8, 100000)
    assert abs(count - predicted) / predicted < 0.01

    report = json.loads(quadflt.scan(10000))
    assert report["n_sf"] == 6082  # squarefree 1 < d <= 10^4

    assert quadflt.mersenne_factor(6) == [(3, 2), (7, 1)]
    assert quadflt.primitive_divisors(6) == []
    try:
        quadflt.verdict(12)
    except ValueError as e:
        assert "not squarefree" in str(e)
    else:
        raise AssertionError("12 accepted")

    print("ok")


if __name__ == "__main__":
    main()

"""Smoke test for the qshare extension: `python python/smoke_test.py`."""

import os
import tempfile
from fractions import Fraction

import qshare


def main():
    prop3 = qshare.Instance.named("prop3")
    assert (prop3.n, prop3.m) == (3, 6)
    assert prop3.quantile_share(1, "4/9") == "0/1"
    q_star, allocation = prop3.maximin()
    assert q_star == "4/9", q_star
    assert sorted(g for bundle in allocation for g in bundle) == list(range(1, 7))

    # weights of the value distribution sum to n^m
    atoms = prop3.distribution(1)
    assert sum(int(w) for _, w in atoms) == 3**6

    same = qshare.Instance.from_json(prop3.to_json())
    assert same.satisfaction(2, [1]) == prop3.satisfaction(2, [1])

    chore = qshare.Instance.named("single_chore", n=4)
    assert chore.maximin()[0] == "1/4"

    additive = qshare.Instance.from_json(
        '{"n": 2, "m": 3, "valuations": ['
        '{"type": "additive", "weights": ["2", "1", "1"]},'
        '{"type": "additive", "weights": ["1", "1", "1"]}]}'
    )
    rr = additive.round_robin()
    report = additive.report(rr, "1/2")
    assert report["fair"] is True
    assert Fraction(report["min_satisfaction"]) >= Fraction(1, 2)
    assert additive.fair_allocation("1/2") is not None
    assert additive.mms(1)[0] == "2/1"

    exhausted = qshare.lab_search(3, 4)
    assert exhausted["status"] == "exhausted" and exhausted["budget"] == "35"
    witness = qshare.lab_search(3, 4, budget=36)
    assert witness["status"] == "counterexample" and witness["verified"]

    with tempfile.TemporaryDirectory() as tmp:
        counts = qshare.export_lp(3, 6, os.path.join(tmp, "m.lp"))
    assert (counts["variables"], counts["monotonicity"], counts["threshold"], counts["allocation"]) == (192, 576, 3, 729)

    assert qshare.lemma9(5, 1)["holds"]
    assert qshare.binomial_qn(3)["first_term"] == "4/9"

    try:
        qshare.lab_search(3, 5)
    except qshare.BudgetError:
        pass
    else:
        raise AssertionError("expected a budget refusal")
    try:
        qshare.Instance.from_json("{}")
    except qshare.QshareError:
        pass
    else:
        raise AssertionError("expected a parse error")

    passed, line = qshare.repro("prop3")
    assert passed and line.startswith("PASS"), line
    print("smoke test ok:", line)


if __name__ == "__main__":
    main()

import numpy as np
import pytest

from cxrkit.metrics import rouge_l


def lcs_table_oracle(a, b):
    """Full-table LCS, written independently of the implementation."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[-1][-1]


def rouge_oracle(candidate, reference):
    c, r = candidate.lower().split(), reference.lower().split()
    if not c or not r:
        return 0.0
    lcs = lcs_table_oracle(c, r)
    if lcs == 0:
        return 0.0
    p, rec = lcs / len(c), lcs / len(r)
    return 2 * p * rec / (p + rec)


def test_identical():
    assert rouge_l("no acute disease", "no acute disease") == 1.0


def test_known_lcs_case():
    # LCS("no acute findings", "acute cardiopulmonary findings") = [acute, findings]
    assert rouge_l("no acute findings", "acute cardiopulmonary findings") == pytest.approx(2 / 3)


def test_disjoint_vocabulary():
    assert rouge_l("aaa bbb", "ccc ddd") == 0.0


def test_empty_sides():
    assert rouge_l("", "anything") == 0.0
    assert rouge_l("anything", "") == 0.0


def test_case_insensitive():
    assert rouge_l("Pleural Effusion", "pleural effusion") == 1.0


def test_matches_dp_oracle_on_random_token_lists():
    rng = np.random.default_rng(17)
    vocab = [f"w{k}" for k in range(12)]
    for _ in range(500):
        cand = " ".join(rng.choice(vocab, size=rng.integers(1, 21)))
        ref = " ".join(rng.choice(vocab, size=rng.integers(1, 21)))
        assert rouge_l(cand, ref) == pytest.approx(rouge_oracle(cand, ref), abs=1e-12)

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyricanchor.anchoring import AlignLabel, AnchorRun, align_words, alignment_cost, select_anchor_runs

from oracles import apply_alignment, brute_edit_distance


def labels_of(ref, hyp):
    return "".join(lab.label for lab in align_words(ref, hyp))


def test_identity():
    assert labels_of("ABC", "ABC") == "CCC"


def test_single_substitution():
    assert labels_of("ABC", "AXC") == "CSC"


def test_deletion_by_hand():
    assert align_words(list("ABCD"), list("ACD")) == [
        AlignLabel("C", 0, 0), AlignLabel("D", 1, None), AlignLabel("C", 2, 1), AlignLabel("C", 3, 2),
    ]


def test_empty_sides():
    assert labels_of("", "AB") == "II"
    assert labels_of("AB", "") == "DD"
    assert align_words([], []) == []


def test_tie_prefers_substitution_over_indels():
    # AB vs BA: sub+sub and del+ins+... tie at cost 2; backtrace takes substitutions
    assert labels_of("AB", "BA") == "SS"


def timings(n):
    return [(k * 0.5, k * 0.5 + 0.4) for k in range(n)]


def labels(pattern):
    """Build labels from a C/S string with both indices advancing together."""
    return [AlignLabel(c, k, k) for k, c in enumerate(pattern)]


def test_five_matches_make_a_run():
    runs = select_anchor_runs(labels("CCCCC"), timings(5), 5)
    assert len(runs) == 1 and runs[0].ref_span == (0, 4) and runs[0].hyp_span == (0, 4)
    assert runs[0].timings == timings(5)


def test_four_matches_do_not():
    assert select_anchor_runs(labels("CCCC"), timings(4), 5) == []


def test_two_runs_around_a_substitution():
    runs = select_anchor_runs(labels("CCCCCSCCCCC"), timings(11), 5)
    assert [r.ref_span for r in runs] == [(0, 4), (6, 10)]


def test_runs_need_consecutive_indices_on_both_sides():
    labs = align_words(list("ABCDEFGHIJ"), list("ABCDEXFGHIJ"))
    runs = select_anchor_runs(labs, timings(11), 5)
    assert [(r.ref_span, r.hyp_span) for r in runs] == [((0, 4), (0, 4)), ((5, 9), (6, 10))]


def test_identity_gives_one_covering_run():
    words = [f"W{k}" for k in range(9)]
    runs = select_anchor_runs(align_words(words, words), timings(9), 5)
    assert len(runs) == 1 and len(runs[0]) == 9
    assert runs[0].words()[3] == (3, 1.5, 1.9)


def test_anchor_run_spans_must_agree():
    with pytest.raises(ValueError):
        AnchorRun((0, 4), (0, 5))


tokens = st.lists(st.sampled_from("ABC"), max_size=8)


@settings(max_examples=150, deadline=None)
@given(tokens, tokens)
def test_alignment_is_valid_and_optimal(ref, hyp):
    labs = align_words(ref, hyp)
    assert apply_alignment(labs, ref, hyp) == (ref, hyp)
    assert alignment_cost(labs) == brute_edit_distance(ref, hyp)
    assert [lab.ref_index for lab in labs if lab.ref_index is not None] == list(range(len(ref)))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from("CSDI"), max_size=30), st.integers(1, 6))
def test_runs_are_maximal_and_ordered(pattern, n):
    labs, r, h = [], 0, 0
    for c in pattern:
        labs.append(AlignLabel(c, r if c != "I" else None, h if c != "D" else None))
        r += c != "I"
        h += c != "D"
    runs = select_anchor_runs(labs, timings(h), n)
    covered = {i for run in runs for i in run.ref_indices}
    for run in runs:
        assert len(run) >= n
        # neither neighbour is a match that could extend the run
        for lab in labs:
            if lab.label == "C" and lab.ref_index in (run.ref_span[0] - 1, run.ref_span[1] + 1):
                assert lab.hyp_index not in (run.hyp_span[0] - 1, run.hyp_span[1] + 1)
    for a, b in zip(runs, runs[1:]):
        assert a.ref_span[1] < b.ref_span[0] and a.hyp_span[1] < b.hyp_span[0]
    # every C inside a long enough C-stretch is covered
    stretch = []
    for lab in labs + [AlignLabel("S", None, None)]:
        if lab.label == "C":
            stretch.append(lab.ref_index)
        else:
            assert (len(stretch) >= n) == bool(stretch and set(stretch) <= covered)
            stretch = []

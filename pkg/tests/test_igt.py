import numpy as np
import pytest

from boolnet import igt
from boolnet.network import ContractError
from boolnet.igt import (
    B,
    D,
    Deck,
    DeckError,
    IgtConfig,
    IgtSession,
    Trial,
    aggregate,
    decode,
    encode,
    history_to_taskset,
    load_decks,
    run_session,
    wanted_output,
)

SHORT = IgtConfig(trials=20, proposals_per_trial=20)


def test_default_deck_stats():
    b, d = load_decks()
    assert b.stats() == (-2330, 170, -62.5)
    assert d.stats() == (-310, 95, -31.25)


def test_deck_file_validation(tmp_path):
    b, d = load_decks()
    (tmp_path / "B.csv").write_text(b.to_csv())
    (tmp_path / "D.csv").write_text(d.to_csv())
    assert load_decks(tmp_path) == (b, d)
    short = "\n".join(d.to_csv().splitlines()[:60]) + "\n"
    (tmp_path / "D.csv").write_text(short)
    with pytest.raises(DeckError):
        load_decks(tmp_path)
    (tmp_path / "D.csv").write_text(d.to_csv().replace("\n1,-310\n", "\n1,-311\n"))
    with pytest.raises(DeckError):
        load_decks(tmp_path)
    with pytest.raises(DeckError):
        load_decks(tmp_path / "missing")


def test_deck_draws_in_order():
    deck = Deck("B'", range(60))
    assert [deck.draw() for _ in range(3)] == [0, 1, 2]
    assert deck.cursor == 3 and deck.remaining == 57
    for _ in range(57):
        deck.draw()
    with pytest.raises(igt.DeckExhausted):
        deck.draw()


def test_encoding_round_trip():
    for label in ("B'", "D'"):
        assert decode(encode(label)) == label
    assert (encode("B'"), encode("D'")) == (-1, 1)


def test_wanted_output_binarization():
    assert wanted_output(B, 170) == B
    assert wanted_output(B, -2330) == D
    assert wanted_output(D, 0) == D


def history(*pairs):
    return [Trial(k + 1, c, p, 0) for k, (c, p) in enumerate(pairs)]


def test_history_to_taskset_examples():
    h = history((B, 170), (B, -2330), (D, 95))
    ts = history_to_taskset(h, first_choice=B)
    assert ts.n_patterns == 3
    assert list(ts.wanted) == [B, D, D]
    # inputs: previous choice, the first trial uses the first choice itself
    assert list(ts.clamp_values[:, 0]) == [B, B, B]
    assert list(ts.pattern_weights) == [170, 2330, 95]
    assert history_to_taskset(h, B, wanted_mode="sign").pattern_weights is None
    with pytest.raises(ContractError):
        history_to_taskset([], B)


def test_first_choice_is_fair():
    firsts = [IgtSession(SHORT, seed=s).run_trial().choice for s in range(400)]
    frac_b = np.mean(np.array(firsts) == B)
    assert abs(frac_b - 0.5) < 0.1


def test_session_invariants():
    decks = load_decks()
    rec = run_session(SHORT, 5, decks)
    assert len(rec.trials) == 20
    assert [t.trial for t in rec.trials] == list(range(1, 21))
    assert rec.trials[-1].budget == sum(t.payoff for t in rec.trials)
    # cards come off each deck in order
    drawn = {B: [], D: []}
    for t in rec.trials:
        drawn[t.choice].append(t.payoff)
    assert drawn[B] == list(decks[0].payoffs[:len(drawn[B])])
    assert drawn[D] == list(decks[1].payoffs[:len(drawn[D])])
    assert run_session(SHORT, 5, decks).to_csv() == rec.to_csv()


def test_session_does_not_consume_caller_decks():
    decks = load_decks()
    run_session(SHORT, 1, decks)
    assert decks[0].cursor == 0 and decks[1].cursor == 0


def test_session_csv_schema():
    text = run_session(IgtConfig(trials=3, proposals_per_trial=5), 0).to_csv()
    lines = text.splitlines()
    assert lines[0] == "trial,choice,payoff,budget,E_after,accept_rate,temperature"
    assert len(lines) == 4
    assert lines[1].split(",")[4] == ""


def test_aggregate_of_identical_records():
    rec = run_session(SHORT, 2)
    agg = aggregate([rec, rec, rec])
    assert list(agg.mode) == [igt.LABELS[c] for c in rec.choices]
    assert np.array_equal(agg.mean_budget, [t.budget for t in rec.trials])


def test_aggregate_ties_and_mismatch():
    a = run_session(IgtConfig(trials=4, proposals_per_trial=5), 0)
    flipped = igt.SessionRecord(1, tuple(Trial(t.trial, -t.choice, 0, 0) for t in a.trials))
    assert set(aggregate([a, flipped]).mode) == {"tie"}
    with pytest.raises(ContractError):
        aggregate([a, run_session(IgtConfig(trials=3, proposals_per_trial=5), 0)])
    with pytest.raises(ContractError):
        aggregate([])


def test_transition_trial():
    agg = igt.Aggregate(("B'", "B'", "tie", "D'", "D'"), None, None, None)
    assert agg.transition_trial() == 4
    assert igt.Aggregate(("D'", "B'"), None, None, None).transition_trial() is None


def test_config_validation():
    with pytest.raises(ContractError):
        IgtConfig(input_mode="nothing")
    with pytest.raises(ContractError):
        IgtConfig(input_neuron=4, output_neuron=4)


@pytest.fixture(scope="module")
def thirty_sessions():
    from boolnet.config import ExperimentConfig
    from boolnet.experiments import igt_config
    cfg = ExperimentConfig(kind="igt", runs=30, seed=0)
    return [run_session(igt_config(cfg), cfg.run_seed(r)) for r in range(30)]


@pytest.mark.slow
def test_perseveration_after_first_big_loss(thirty_sessions):
    persisted = 0
    for rec in thirty_sessions:
        losses = [k for k, t in enumerate(rec.trials) if t.choice == B and t.payoff <= -1000]
        if losses and any(t.choice == B for t in rec.trials[losses[0] + 1:]):
            persisted += 1
    assert persisted > 15


@pytest.mark.slow
def test_late_uphill_moves_are_rejected(thirty_sessions):
    late = [t.uphill_accept_rate for rec in thirty_sessions for t in rec.trials[40:]]
    late = [v for v in late if v == v]
    assert late and np.mean(late) < 0.05

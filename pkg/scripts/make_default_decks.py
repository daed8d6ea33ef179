"""Regenerate the shipped default deck series.

B': a run of small wins, one severe loss, then a mix of wins and moderate
losses.  D': an early loss, a long stretch of small wins with occasional
small losses, and the deck's heavier losses at the bottom.  Both series meet
the required min / max / mean exactly.

    python scripts/make_default_decks.py src/boolnet/data
"""

import sys
from pathlib import Path

from boolnet.igt import DECK_STATS, Deck


def deck_b():
    head = [170] * 16 + [-2330, 170, -1250]
    tail = [170, -350] * 19 + [170, 170, 170]
    tail[-4] = -500
    return head + tail


def deck_d():
    head = [-310] + ([95, 95, 95, 95, -50] * 8)[:39]
    bottom = [95, -310, -310, -310] * 5
    bottom[-4] = 15
    return head + bottom


def main(out_dir):
    out = Path(out_dir)
    for label, cards, fname in (("B'", deck_b(), "deck_B.csv"), ("D'", deck_d(), "deck_D.csv")):
        deck = Deck(label, cards)
        deck.check_stats(DECK_STATS[label])
        (out / fname).write_text(deck.to_csv())


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")

import numpy as np
import pytest

from edl import nested_codec as nc
from edl.errors import (CrossingSpans, PlaceholderCountMismatch,
                        UnmatchedBracket)
from edl.nested_codec import Span
from edl.synth import random_labeling


def sym(text):
    return nc.parse_rendered(text)


class TestLinearize:
    def test_nested_fac_per(self):
        spans = {Span(0, 3, "FAC", "NAM"), Span(0, 1, "PER", "NAM")}
        assert nc.render_symbols(nc.linearize(3, spans)) == \
            "[_FAC [_PER Z ]_PER Z Z ]_FAC </s>"

    def test_no_spans(self):
        assert nc.render_symbols(nc.linearize(2, set())) == "Z Z </s>"

    def test_single_flat_entity(self):
        assert nc.render_symbols(nc.linearize(1, {Span(0, 1, "PER",
                                                       "NAM")})) == \
            "[_PER Z ]_PER </s>"

    def test_crossing_rejected(self):
        with pytest.raises(CrossingSpans):
            nc.linearize(4, {Span(0, 2, "PER", "NAM"),
                             Span(1, 3, "ORG", "NAM")})

    def test_duplicate_boundaries_rejected(self):
        with pytest.raises(CrossingSpans):
            nc.linearize(2, {Span(0, 2, "PER", "NAM"),
                             Span(0, 2, "ORG", "NAM")})

    def test_same_start_longer_opens_first(self):
        spans = {Span(0, 2, "ORG", "NAM"), Span(0, 1, "PER", "NAM")}
        assert nc.render_symbols(nc.linearize(2, spans)) == \
            "[_ORG [_PER Z ]_PER Z ]_ORG </s>"

    def test_output_length_invariant(self, rng):
        for _ in range(100):
            length = int(rng.integers(1, 12))
            spans = random_labeling(rng, length)
            assert len(nc.linearize(length, spans)) == \
                length + 2 * len(spans) + 1


class TestParseSymbols:
    def test_inverse_of_paper_example(self):
        spans = {Span(0, 3, "FAC", "NAM"), Span(0, 1, "PER", "NAM")}
        assert nc.parse_symbols(3, nc.linearize(3, spans)) == spans

    def test_placeholder_count_mismatch(self):
        with pytest.raises(PlaceholderCountMismatch):
            nc.parse_symbols(3, sym("Z Z"))

    def test_unmatched_bracket(self):
        with pytest.raises(UnmatchedBracket):
            nc.parse_symbols(2, sym("[_PER Z Z"))

    def test_mismatched_close(self):
        with pytest.raises(UnmatchedBracket):
            nc.parse_symbols(1, sym("[_PER Z ]_ORG"))

    def test_roundtrip_randomized(self, rng):
        for _ in range(300):
            length = int(rng.integers(1, 15))
            spans = random_labeling(rng, length)
            assert nc.parse_symbols(length, nc.linearize(length, spans)) \
                == spans


class TestRepair:
    def test_unclosed_open_dropped(self):
        assert nc.render_symbols(nc.repair(sym("[_PER Z Z"))) == "Z Z"

    def test_stray_close_dropped(self):
        assert nc.render_symbols(nc.repair(sym("[_FAC Z ]_PER ]_FAC"))) == \
            "[_FAC Z ]_FAC"

    def test_well_formed_unchanged(self, rng):
        for _ in range(50):
            length = int(rng.integers(1, 10))
            symbols = nc.linearize(length, random_labeling(rng, length))
            assert nc.repair(symbols) == symbols

    def test_idempotent_and_parseable(self, rng):
        symbols = list(nc.SYMBOLS)
        for _ in range(300):
            n = int(rng.integers(0, 14))
            seq = [symbols[int(i)]
                   for i in rng.integers(0, len(symbols), n)]
            repaired = nc.repair(seq)
            assert nc.repair(repaired) == repaired
            placeholders = sum(1 for s in seq if s.op == "z")
            kept = sum(1 for s in repaired if s.op == "z")
            # placeholders are never dropped (up to a mid-sequence </s>)
            cut = next((i for i, s in enumerate(seq) if s.op == "eos"),
                       len(seq))
            assert kept == sum(1 for s in seq[:cut] if s.op == "z")
            assert placeholders >= kept
            nc.parse_symbols(kept, repaired)  # must not raise

    def test_empty_pair_dropped(self):
        assert nc.repair(sym("[_PER ]_PER Z")) == sym("Z")


class TestBio:
    def test_outermost_only(self):
        spans = {Span(0, 3, "FAC", "NAM"), Span(0, 1, "PER", "NAM")}
        assert nc.flatten_to_bio(3, spans) == \
            ["B-FAC-NAM", "I-FAC-NAM", "I-FAC-NAM"]

    def test_no_spans(self):
        assert nc.flatten_to_bio(2, set()) == ["O", "O"]

    def test_adjacent_spans_get_two_bs(self):
        spans = {Span(0, 1, "PER", "NAM"), Span(1, 2, "PER", "NAM")}
        assert nc.flatten_to_bio(2, spans) == ["B-PER-NAM", "B-PER-NAM"]

    def test_round_trip_nesting_free(self, rng):
        done = 0
        while done < 500:
            length = int(rng.integers(1, 12))
            spans = random_labeling(rng, length)
            if nc.outermost_spans(spans) != spans:
                continue  # keep only nesting-free labelings
            done += 1
            assert nc.bio_to_spans(nc.flatten_to_bio(length, spans)) == spans

    def test_tag_alphabet_sizes(self):
        assert len(nc.FLAT_TAGS) == 21
        assert len(nc.SYMBOLS) == 22

'''
Unit tests for protocol.py.
'''

import unittest as ut
from dataclasses import replace
import json
import math

from parallax.geometry import DecodeVerdict
from parallax.protocol import (SecretBit, SecretConfig, AbortCause, AdversaryAction,
                               Channel, ChannelEvent, RoundSummary, ProtocolError,
                               BASIS_PAIRS, DEALER, dealer_choose_secret, dealer_select_ghz,
                               length_check, run_round, run_rounds, transcript_to_dict,
                               verdict_secret)
from parallax.states import SecretCoefficients, ghz_basis
from parallax.tables import Family, generate_tables
from parallax.tools import make_rng, dump_document

COEFFS = SecretCoefficients.from_a_squared('1/2')

class Dealer(ut.TestCase):

    def test_secret_config(self):
        rng = make_rng(0)
        seen_pairs = set()
        seen_bits = set()
        for _ in range(500):
            cfg, bit = dealer_choose_secret(rng, COEFFS)
            self.assertNotEqual(cfg.m0_basis, cfg.m1_basis)
            self.assertIn(cfg.pair, BASIS_PAIRS)
            seen_pairs.add(cfg.pair)
            seen_bits.add(bit)
        self.assertEqual(seen_pairs, set(BASIS_PAIRS))
        self.assertEqual(seen_bits, {SecretBit.M0, SecretBit.M1})

    def test_secret_config_frequencies(self):
        rng = make_rng(3)
        draws = 12000
        pairs = {pair: 0 for pair in BASIS_PAIRS}
        low_is_m0 = 0
        m0_sent = 0
        for _ in range(draws):
            cfg, bit = dealer_choose_secret(rng, COEFFS)
            pairs[cfg.pair] += 1
            low_is_m0 += cfg.m0_basis == cfg.pair[0]
            m0_sent += bit is SecretBit.M0

        sigma = math.sqrt((1/6)*(5/6)/draws)
        for pair, count in pairs.items():
            with self.subTest(pair=pair):
                self.assertLess(abs(count/draws - 1/6), 3*sigma)

        sigma = math.sqrt(0.25/draws)
        self.assertLess(abs(low_is_m0/draws - 0.5), 3*sigma)
        self.assertLess(abs(m0_sent/draws - 0.5), 3*sigma)

    def test_same_basis_rejected(self):
        with self.assertRaises(ValueError):
            SecretConfig(COEFFS, 2, 2)

    def test_basis_for(self):
        cfg = SecretConfig(COEFFS, 3, 1)
        self.assertEqual(cfg.basis_for(SecretBit.M0), 3)
        self.assertEqual(cfg.basis_for(SecretBit.M1), 1)
        self.assertEqual(cfg.pair, (1, 3))

    def test_select_ghz(self):
        ts = generate_tables(4, seed=2)
        rng = make_rng(1)
        for bit in SecretBit:
            for _ in range(50):
                selection = dealer_select_ghz(bit, ts, rng)
                self.assertEqual(len(selection), 4)
                for pid, i in enumerate(selection, start=1):
                    with self.subTest(bit=bit, pid=pid):
                        self.assertIs(ts.table(pid).family(i), bit.family)

    def test_families(self):
        self.assertIs(SecretBit.M0.family, Family.PARALLEL)
        self.assertIs(SecretBit.M1.family, Family.INTERSECT)

    def test_verdict_secret(self):
        self.assertIs(verdict_secret(DecodeVerdict.M0), SecretBit.M0)
        self.assertIs(verdict_secret(DecodeVerdict.M1), SecretBit.M1)
        self.assertIsNone(verdict_secret(DecodeVerdict.INCONCLUSIVE))

class ChannelTests(ut.TestCase):

    def test_fifo(self):
        ch = Channel()
        ch.declare(1, 2)
        ch.send(ChannelEvent(DEALER, 1, ghz_basis(0)))
        ch.send(ChannelEvent(DEALER, 2, ghz_basis(1)))
        ch.send(ChannelEvent(DEALER, 1, ghz_basis(2)))
        got = ch.receive_all(1)
        self.assertEqual([e.payload for e in got], [ghz_basis(0), ghz_basis(2)])
        self.assertEqual(ch.receive_all(1), [])
        self.assertEqual(len(ch.receive_all(2)), 1)
        self.assertEqual(ch.declared(1), 2)
        self.assertEqual(ch.declared(3), 0)

    def test_captured_not_delivered(self):
        ch = Channel()
        ch.send(ChannelEvent(DEALER, 1, None, AdversaryAction.CAPTURED))
        self.assertEqual(ch.receive_all(1), [])
        self.assertEqual(len(ch.events), 1)

    def test_length_check(self):
        self.assertTrue(length_check(1, 1))
        self.assertFalse(length_check(1, 0))

class Round(ut.TestCase):

    def test_completeness(self):
        for n in [2, 3, 5]:
            ts = generate_tables(n, seed=n)
            for k in range(100):
                with self.subTest(n=n, round_index=k):
                    t = run_round(n, ts, COEFFS, seed=4, round_index=k)
                    self.assertFalse(t.aborted)
                    self.assertTrue(t.correct)
                    self.assertIsNone(t.abort_cause)
                    self.assertEqual(t.measurement_outcomes, t.ghz_selection)
                    self.assertEqual(t.declared_basis,
                                     t.secret_config.basis_for(t.secret_bit_sent))

    def test_lines_and_matrix(self):
        ts = generate_tables(3, seed=1)
        t = run_round(3, ts, COEFFS, seed=0, round_index=0)
        for pid, (i, line) in enumerate(zip(t.measurement_outcomes, t.lines), start=1):
            self.assertEqual(ts.table(pid).lookup(i), line)
        expected = 0 if t.secret_bit_sent is SecretBit.M0 else 1
        for i in range(3):
            for j in range(3):
                self.assertEqual(t.matrix.entries[i, j], 0 if i == j else expected)

    def test_reproducible(self):
        ts = generate_tables(3, seed=1)
        a = run_round(3, ts, COEFFS, seed=12, round_index=3)
        b = run_round(3, ts, COEFFS, seed=12, round_index=3)
        self.assertEqual(dump_document(a.to_dict()), dump_document(b.to_dict()))

    def test_round_index_matters(self):
        ts = generate_tables(3, seed=1)
        selections = {run_round(3, ts, COEFFS, seed=12, round_index=k).ghz_selection
                      for k in range(20)}
        self.assertGreater(len(selections), 1)

    def test_table_mismatch(self):
        ts = generate_tables(3, seed=1)
        with self.assertRaises(ProtocolError):
            run_round(2, ts, COEFFS)

    def test_transcript_document(self):
        ts = generate_tables(2, seed=1)
        t = run_round(2, ts, COEFFS, seed=3, round_index=1)
        doc = json.loads(dump_document(transcript_to_dict(t)))
        self.assertEqual(doc['n'], 2)
        self.assertEqual(doc['table_set'], {'generation_seed': 1, 'digest': ts.digest()})
        self.assertEqual(doc['round_index'], 1)
        self.assertEqual(doc['rng_seed'], 3)
        self.assertEqual(len(doc['channel_events']), 2)
        self.assertEqual(doc['channel_events'][0]['from'], DEALER)
        self.assertEqual(len(doc['channel_events'][0]['payload']), 8)
        self.assertEqual(doc['recovered_secret'], doc['secret_bit_sent'])
        self.assertIsNone(doc['abort_cause'])

class CapturingAdversary:

    def __init__(self, targets):
        self.targets = targets

    def intercepts(self, receiver):
        return receiver in self.targets

    def act(self, event, rng):
        return replace(event, payload=None, adversary_action=AdversaryAction.CAPTURED), None

class Abort(ut.TestCase):

    def test_capture_aborts(self):
        ts = generate_tables(3, seed=1)
        adversary = CapturingAdversary({2})
        for k in range(20):
            t = run_round(3, ts, COEFFS, adversary=adversary, seed=0, round_index=k)
            with self.subTest(round_index=k):
                self.assertTrue(t.aborted)
                self.assertIs(t.abort_cause, AbortCause.CAPTURED)
                self.assertIsNone(t.declared_basis)
                self.assertIsNone(t.verdict)

    def test_inconclusive_no_declaration(self):
        # participant 3 always gets an intersect-family triplet, so every M0
        # round mixes families
        ts = generate_tables(3, seed=1)
        idx = ts.table(3).family_indices(Family.INTERSECT)[0]

        class Swapper(CapturingAdversary):
            def act(self, event, rng):
                return replace(event, payload=ghz_basis(idx),
                               adversary_action=AdversaryAction.MEASURED_AND_RESENT), None

        swapper = Swapper({3})
        found = False
        for k in range(50):
            t = run_round(3, ts, COEFFS, adversary=swapper, seed=0, round_index=k)
            if t.abort_cause is AbortCause.INCONCLUSIVE:
                found = True
                self.assertIs(t.secret_bit_sent, SecretBit.M0)
                self.assertIs(t.verdict, DecodeVerdict.INCONCLUSIVE)
                self.assertIsNone(t.declared_basis)
                self.assertIsNone(t.recovered_secret)
        self.assertTrue(found)

class Rounds(ut.TestCase):

    def test_summary(self):
        ts = generate_tables(3, seed=7)
        transcripts, summary = run_rounds(3, ts, COEFFS, rounds=200, seed=7)
        self.assertEqual(len(transcripts), 200)
        self.assertEqual([t.round_index for t in transcripts], list(range(200)))
        self.assertEqual(summary.correct, 200)
        self.assertEqual(summary.rounds, 200)
        self.assertEqual(summary.abort, 0)
        self.assertEqual(summary.to_dict()['abort_by_cause'],
                         {'captured': 0, 'inconclusive': 0})

    def test_summary_counts(self):
        ts = generate_tables(2, seed=0)
        _, summary = run_rounds(2, ts, COEFFS, rounds=10, seed=0,
                                adversary=CapturingAdversary({1}))
        self.assertEqual(summary.abort_captured, 10)
        self.assertEqual(summary.correct, 0)

    def test_empty_summary(self):
        s = RoundSummary()
        self.assertEqual(s.rounds, 0)

    def test_bad_rounds(self):
        ts = generate_tables(2, seed=0)
        with self.assertRaises(ValueError):
            run_rounds(2, ts, COEFFS, rounds=0, seed=0)

if __name__ == '__main__':
    ut.main()

'''
Unit tests for tables.py.
'''

import unittest as ut
from itertools import product
import json
import math
import os
import tempfile

from parallax import config
from parallax.geometry import (Line, LineRelation, DecodeVerdict, decode, judging_matrix,
                               relation)
from parallax.tables import (Family, Row, CoefficientTable, TableSet, TableError,
                             generate_tables, verify_tables, save_tables,
                             load_tables, tables_from_dict, lookup)

class Generate(ut.TestCase):

    def test_shape(self):
        for n in [2, 3, 5]:
            with self.subTest(n=n):
                ts = generate_tables(n, seed=1)
                self.assertEqual(ts.n, n)
                self.assertEqual(len(ts.tables), n)
                for pid, t in enumerate(ts.tables, start=1):
                    self.assertEqual(t.participant_id, pid)
                    self.assertEqual(len(t.rows), 8)
                    self.assertEqual(len(t.family_indices(Family.PARALLEL)), 4)
                    self.assertEqual(len(t.family_indices(Family.INTERSECT)), 4)

    def test_valid(self):
        for n in [2, 3, 4, 8]:
            for seed in [0, 1, 42]:
                with self.subTest(n=n, seed=seed):
                    ts = generate_tables(n, seed)
                    self.assertEqual(verify_tables(ts), [])
                    self.assertEqual(verify_tables(ts, include_mixed=True), [])

    def test_deterministic(self):
        a = generate_tables(3, seed=7)
        b = generate_tables(3, seed=7)
        self.assertEqual(a, b)
        self.assertEqual(a.digest(), b.digest())
        self.assertNotEqual(a.digest(), generate_tables(3, seed=8).digest())

    def test_coefficient_bound(self):
        old = config.max_coeff
        try:
            config.max_coeff = 50
            ts = generate_tables(4, seed=3)
        finally:
            config.max_coeff = old

        self.assertEqual(verify_tables(ts), [])
        for t in ts.tables:
            for r in t.rows:
                with self.subTest(line=r.line):
                    self.assertTrue(all(abs(x) <= 50 for x in r.line.to_tuple()))

    def test_bound_too_small(self):
        old = config.max_coeff
        try:
            config.max_coeff = 5
            with self.assertRaises(ValueError):
                generate_tables(2, seed=0)
        finally:
            config.max_coeff = old

    def test_max_n(self):
        with self.assertRaises(ValueError):
            generate_tables(config.max_n + 1, seed=0)

    def test_bad_args(self):
        for n, seed in [(1, 0), (0, 0), (2, -1), (2.5, 0)]:
            with self.subTest(n=n, seed=seed):
                with self.assertRaises(ValueError):
                    generate_tables(n, seed)

    def test_family_relations(self):
        ts = generate_tables(3, seed=11)
        for p1 in range(1, 4):
            for p2 in range(p1+1, 4):
                for i in ts.family_indices(p1, Family.PARALLEL):
                    for j in ts.family_indices(p2, Family.PARALLEL):
                        self.assertIs(relation(lookup(ts.table(p1), i), ts.table(p2).lookup(j)),
                                      LineRelation.PARALLEL)
                for i in ts.family_indices(p1, Family.INTERSECT):
                    for j in ts.family_indices(p2, Family.INTERSECT):
                        self.assertIs(relation(ts.table(p1).lookup(i), ts.table(p2).lookup(j)),
                                      LineRelation.INTERSECTING)

    def test_every_selection_decodes(self):
        # every family-consistent choice of one row per participant
        for n in [2, 3, 4]:
            for seed in [0, 1, 2]:
                ts = generate_tables(n, seed)
                for family, correct in [(Family.PARALLEL, DecodeVerdict.M0),
                                        (Family.INTERSECT, DecodeVerdict.M1)]:
                    choices = [t.family_indices(family) for t in ts.tables]
                    with self.subTest(n=n, seed=seed, family=family):
                        for selection in product(*choices):
                            lines = [ts.table(p).lookup(i)
                                     for p, i in enumerate(selection, start=1)]
                            self.assertIs(decode(judging_matrix(lines)), correct)

    def test_family_uniformity(self):
        seeds = 600
        counts = [0]*8
        for seed in range(seeds):
            for i in generate_tables(2, seed).family_indices(1, Family.PARALLEL):
                counts[i] += 1
        sigma = math.sqrt(0.25/seeds)
        for i, count in enumerate(counts):
            with self.subTest(ghz_index=i):
                self.assertLess(abs(count/seeds - 0.5), 3*sigma)

class Verify(ut.TestCase):

    def setUp(self):
        self.ts = generate_tables(2, seed=5)

    def replace_row(self, pid, idx, row):
        tables = list(self.ts.tables)
        rows = list(tables[pid-1].rows)
        rows[idx] = row
        tables[pid-1] = CoefficientTable(pid, rows)
        return TableSet(self.ts.n, tuple(tables), self.ts.generation_seed)

    def test_rotated_parallel_row(self):
        t2 = self.ts.table(2)
        p = t2.family_indices(Family.PARALLEL)[0]
        line = t2.lookup(p)
        # a quarter turn, never parallel to the shared direction
        bad = self.replace_row(2, p, Row(Line(-line.b, line.a, line.c), Family.PARALLEL))

        violations = verify_tables(bad)
        self.assertEqual(len(violations), 4*self.ts.n - 1)
        for v in violations:
            with self.subTest(violation=v.message):
                self.assertEqual(v.kind, 'relation')
                self.assertTrue(v.involves(2, p))
                self.assertEqual(v.relation, LineRelation.INTERSECTING.value)

    def test_intersect_made_parallel(self):
        t2 = self.ts.table(2)
        i = t2.family_indices(Family.INTERSECT)[0]
        j = self.ts.table(1).family_indices(Family.INTERSECT)[0]
        other = self.ts.table(1).lookup(j)
        bad = self.replace_row(2, i, Row(Line(other.a, other.b, other.c + 1), Family.INTERSECT))

        violations = verify_tables(bad)
        self.assertEqual(len(violations), 1)
        self.assertEqual(violations[0].kind, 'relation')
        self.assertEqual(violations[0].participants, (1, 2))
        self.assertEqual(violations[0].ghz_indices, (j, i))
        self.assertEqual(violations[0].relation, LineRelation.PARALLEL.value)

    def test_mixed_pairs(self):
        t2 = self.ts.table(2)
        i = t2.family_indices(Family.INTERSECT)[0]
        par = t2.lookup(t2.family_indices(Family.PARALLEL)[0])
        # an intersect row along the shared parallel direction
        bad = self.replace_row(2, i, Row(Line(par.a, par.b, par.c + 1), Family.INTERSECT))

        self.assertEqual(verify_tables(bad), [])
        violations = verify_tables(bad, include_mixed=True)
        self.assertEqual(len(violations), 4*self.ts.n)
        for v in violations:
            with self.subTest(violation=v.message):
                self.assertEqual(v.kind, 'mixed_relation')
                self.assertTrue(v.involves(2, i))
                self.assertEqual(v.relation, LineRelation.PARALLEL.value)

    def test_coincident(self):
        t1 = self.ts.table(1)
        t2 = self.ts.table(2)
        p1 = t1.family_indices(Family.PARALLEL)[0]
        p2 = t2.family_indices(Family.PARALLEL)[0]
        bad = self.replace_row(2, p2, Row(t1.lookup(p1), Family.PARALLEL))

        violations = verify_tables(bad)
        self.assertEqual(len(violations), 1)
        v = violations[0]
        self.assertEqual(v.kind, 'coincident')
        self.assertEqual(v.participants, (1, 2))
        self.assertEqual(v.ghz_indices, (p1, p2))

    def test_family_size(self):
        t1 = self.ts.table(1)
        i = t1.family_indices(Family.INTERSECT)[0]
        bad = self.replace_row(1, i, Row(t1.lookup(i), Family.PARALLEL))
        kinds = {v.kind for v in verify_tables(bad)}
        self.assertIn('family_size', kinds)

    def test_row_count(self):
        with self.assertRaises(TableError):
            CoefficientTable(1, self.ts.table(1).rows[:7])

    def test_participant_ids(self):
        with self.assertRaises(TableError):
            TableSet(2, (self.ts.table(2), self.ts.table(1)), 0)
        with self.assertRaises(TableError):
            TableSet(3, self.ts.tables, 0)

class SaveLoad(ut.TestCase):

    def setUp(self):
        self.ts = generate_tables(3, seed=9)
        fd, self.path = tempfile.mkstemp(suffix='.json')
        os.close(fd)

    def tearDown(self):
        os.remove(self.path)

    def write(self, doc):
        with open(self.path, 'w') as f:
            json.dump(doc, f)

    def test_round_trip(self):
        save_tables(self.ts, self.path)
        loaded = load_tables(self.path)
        self.assertEqual(loaded, self.ts)
        self.assertEqual(loaded.digest(), self.ts.digest())

    def test_meta_ignored(self):
        save_tables(self.ts, self.path, meta={'command': 'gen-tables'})
        self.assertEqual(load_tables(self.path), self.ts)

    def test_byte_identical(self):
        save_tables(self.ts, self.path)
        with open(self.path) as f:
            first = f.read()
        save_tables(generate_tables(3, seed=9), self.path)
        with open(self.path) as f:
            self.assertEqual(f.read(), first)

    def test_malformed_json(self):
        with open(self.path, 'w') as f:
            f.write('{not json')
        with self.assertRaises(TableError):
            load_tables(self.path)

    def test_bad_documents(self):
        good = self.ts.to_dict()

        def modified(fn):
            doc = json.loads(json.dumps(good))
            fn(doc)
            return doc

        def set_row(key, value):
            def fn(doc):
                doc['tables'][0]['rows'][0][key] = value
            return fn

        fail_cases = [
            ('schema', modified(lambda d: d.update(schema_version=99))),
            ('missing n', modified(lambda d: d.pop('n'))),
            ('n mismatch', modified(lambda d: d.update(n=4))),
            ('float coefficient', modified(set_row('a', 1.5))),
            ('bool coefficient', modified(set_row('b', True))),
            ('bad family', modified(set_row('family', 'diagonal'))),
            ('row order', modified(set_row('ghz_index', 3))),
            ('short table', modified(lambda d: d['tables'][1]['rows'].pop())),
        ]
        for name, doc in fail_cases:
            with self.subTest(case=name):
                with self.assertRaises(TableError):
                    tables_from_dict(doc)

    def test_row_count_violation(self):
        doc = self.ts.to_dict()
        doc['tables'][1]['rows'].pop()
        with self.assertRaises(TableError) as cm:
            tables_from_dict(doc)
        self.assertEqual([v.kind for v in cm.exception.violations], ['row_count'])

    def test_invalid_line_violation(self):
        doc = self.ts.to_dict()
        doc['tables'][0]['rows'][2].update(a=0, b=0)
        with self.assertRaises(TableError) as cm:
            tables_from_dict(doc)
        self.assertEqual([v.kind for v in cm.exception.violations], ['invalid_line'])
        self.assertTrue(cm.exception.violations[0].involves(1, 2))

    def test_invariant_violation_reported(self):
        doc = self.ts.to_dict()
        i = self.ts.table(1).family_indices(Family.INTERSECT)[0]
        j = self.ts.table(2).family_indices(Family.INTERSECT)[0]
        other = self.ts.table(2).lookup(j)
        doc['tables'][0]['rows'][i].update(a=other.a, b=other.b)
        with self.assertRaises(TableError) as cm:
            tables_from_dict(doc)
        self.assertTrue(cm.exception.violations)
        self.assertTrue(all(v.involves(1, i) for v in cm.exception.violations))

    def test_mixed_pairs_accepted(self):
        doc = self.ts.to_dict()
        t = self.ts.table(1)
        i = t.family_indices(Family.INTERSECT)[0]
        par = t.lookup(t.family_indices(Family.PARALLEL)[0])
        doc['tables'][0]['rows'][i].update(a=par.a, b=par.b)
        self.write(doc)
        loaded = load_tables(self.path)
        self.assertEqual(loaded.table(1).lookup(i).direction, par.direction)
        kinds = {v.kind for v in verify_tables(loaded, include_mixed=True)}
        self.assertEqual(kinds, {'mixed_relation'})

    def test_undecodable_file(self):
        with open(self.path, 'wb') as f:
            f.write(b'{"schema_version": \xff\xfe}')
        with self.assertRaises(TableError):
            load_tables(self.path)

    def test_huge_integer(self):
        with open(self.path, 'w') as f:
            f.write('{"schema_version": ' + '9'*5000 + '}')
        with self.assertRaises(TableError):
            load_tables(self.path)

    def test_refuse_invalid_save(self):
        t1 = self.ts.table(1)
        rows = list(t1.rows)
        i = t1.family_indices(Family.INTERSECT)[0]
        rows[i] = Row(rows[i].line, Family.PARALLEL)
        bad = TableSet(3, (CoefficientTable(1, rows),) + self.ts.tables[1:], 9)
        with self.assertRaises(TableError):
            save_tables(bad, self.path)

if __name__ == '__main__':
    ut.main()

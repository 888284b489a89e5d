"""
Unit tests for corpus aggregation, percentage formatting, the JSON
report schema and table rendering.
"""

import json
import unittest
from decimal import Decimal

from hypothesis import given, settings
from hypothesis import strategies as st

from config import ProfileRegistry
from detectors import Evidence, Feature, FeatureMatrix, Finding, Verdict, run_all
from detectors.model import indeterminate
from report import (
    EmptyCorpus,
    SchemaError,
    aggregate,
    format_percentage,
    format_ratio,
    from_json,
    matrix_summary,
    merge,
    percentage,
    summarize_matrix,
    summary_to_dict,
    to_json,
    to_table,
)

from tests import firmware

NA = "n/a"


def finding(feature: Feature, verdict) -> Finding:
    if verdict == NA:
        return indeterminate(feature, "does not apply", applicable=False)
    if verdict is Verdict.INDETERMINATE:
        return indeterminate(feature, "unresolved")
    evidence = (Evidence(0x08000100, "synthetic"),) if verdict is Verdict.PRESENT else ()
    return Finding(feature, verdict, evidence)


def matrix(image_id: str, profile: str = "generic", device=None, errors=(), **verdicts) -> FeatureMatrix:
    """All rows Absent unless overridden by feature value."""
    findings = tuple(finding(f, verdicts.get(f.value, Verdict.ABSENT)) for f in Feature)
    return FeatureMatrix(image_id, profile, findings, device_id=device, errors=tuple(errors))


class TestPercentages(unittest.TestCase):
    """Two-decimal half-up formatting."""

    def test_formatting(self):
        self.assertEqual(format_ratio(Decimal("0.5555")), "55.55%")
        self.assertEqual(format_percentage(Decimal("55.555")), "55.56%")
        self.assertEqual(format_percentage(Decimal("0.005")), "0.01%")
        self.assertEqual(format_percentage(Decimal(100)), "100.00%")
        self.assertEqual(format_percentage(None), "-")

    def test_percentage(self):
        self.assertEqual(percentage(1, 4), Decimal("25.00"))
        self.assertEqual(percentage(2, 3), Decimal("66.67"))
        self.assertEqual(percentage(1, 8), Decimal("12.50"))
        self.assertIsNone(percentage(0, 0))


class TestAggregation(unittest.TestCase):
    """Counting verdicts over a corpus."""

    def test_stack_separation_quarter(self):
        corpus = [matrix(f"fw{n}") for n in range(3)]
        corpus.append(matrix("fw3", stack_separation=Verdict.PRESENT))
        row = aggregate(corpus).row(Feature.STACK_SEPARATION)
        self.assertEqual((row.present, row.applicable(Feature.STACK_SEPARATION)), (1, 4))
        self.assertEqual(format_percentage(row.percentage(Feature.STACK_SEPARATION)), "25.00%")

    def test_task_guard_over_rtos_images_only(self):
        corpus = [
            matrix("rtos0", rtos=Verdict.PRESENT, task_stack_guard=Verdict.PRESENT),
            matrix("rtos1", rtos=Verdict.PRESENT, task_stack_guard=Verdict.PRESENT),
            matrix("rtos2", rtos=Verdict.PRESENT, task_stack_guard=Verdict.ABSENT),
        ]
        corpus += [matrix(f"bare{n}", task_stack_guard=NA) for n in range(5)]
        summary = aggregate(corpus)
        guard = summary.row(Feature.TASK_STACK_GUARD)
        self.assertEqual(guard.applicable(Feature.TASK_STACK_GUARD), 3)
        self.assertEqual(format_percentage(guard.percentage(Feature.TASK_STACK_GUARD)), "66.67%")
        rtos = summary.row(Feature.RTOS)
        self.assertEqual(format_percentage(rtos.percentage(Feature.RTOS)), "37.50%")

    def test_footnoted_rows_drop_indeterminate(self):
        corpus = [
            matrix("a", barrier_compliance=Verdict.PRESENT),
            matrix("b", barrier_compliance=Verdict.INDETERMINATE),
        ]
        row = aggregate(corpus).row(Feature.BARRIER)
        self.assertEqual(row.applicable(Feature.BARRIER), 1)
        privilege = aggregate([matrix("a"), matrix("b", privilege_separation=Verdict.INDETERMINATE)])
        self.assertEqual(privilege.row(Feature.PRIVILEGE_SEPARATION).applicable(Feature.PRIVILEGE_SEPARATION), 2)

    def test_nothing_applies(self):
        summary = aggregate([matrix("a", readback_protection=NA), matrix("b", readback_protection=NA)])
        row = summary.row(Feature.READBACK_PROTECTION)
        self.assertIsNone(row.percentage(Feature.READBACK_PROTECTION))
        self.assertEqual(summary_to_dict(summary)["total"]["features"]["readback_protection"]["percentage"], "-")

    def test_groups_and_devices(self):
        summary = aggregate([
            matrix("a", "nordic-nrf52", device="dk-1"),
            matrix("b", "nordic-nrf52", device="dk-1"),
            matrix("c", "generic"),
            matrix("d", "generic", errors=["base inference: no viable base"]),
        ])
        self.assertEqual(summary.group_ids, ["generic", "nordic-nrf52"])
        self.assertEqual(len(summary.groups["nordic-nrf52"].devices), 1)
        self.assertEqual(len(summary.groups["generic"].devices), 2)
        self.assertEqual(summary.total.images, 4)
        self.assertEqual(len(summary.total.devices), 3)
        self.assertEqual(summary.total.errored, 1)

    def test_empty_corpus(self):
        with self.assertRaises(EmptyCorpus):
            aggregate([])

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.sampled_from(["generic", "nordic-nrf51", "nordic-nrf52"]),
                st.sampled_from([Verdict.PRESENT, Verdict.ABSENT, Verdict.INDETERMINATE, NA]),
                st.sampled_from([None, "d1", "d2"]),
            ),
            min_size=3, max_size=12,
        ),
        st.data(),
    )
    def test_merge_is_order_independent(self, specs, data):
        matrices = [matrix(f"fw{n}", profile, device, mpu=verdict)
                    for n, (profile, verdict, device) in enumerate(specs)]
        whole = aggregate(matrices)
        cut1 = data.draw(st.integers(1, len(matrices) - 2))
        cut2 = data.draw(st.integers(cut1 + 1, len(matrices) - 1))
        a, b, c = (aggregate(matrices[:cut1]), aggregate(matrices[cut1:cut2]), aggregate(matrices[cut2:]))
        self.assertEqual(merge(merge(a, b), c), whole)
        self.assertEqual(merge(a, merge(b, c)), whole)
        self.assertEqual(summary_to_dict(merge(c, merge(a, b))), summary_to_dict(whole))


class TestJsonReport(unittest.TestCase):
    """Schema-versioned per-image documents."""

    @classmethod
    def setUpClass(cls):
        profile = ProfileRegistry().get("generic")
        cls.matrix = run_all(firmware.mpu_enabled(), profile)

    def test_round_trip_is_byte_identical(self):
        text = to_json(self.matrix)
        self.assertEqual(to_json(from_json(text)), text)

    def test_layout(self):
        document = json.loads(to_json(self.matrix))
        self.assertEqual(document["schema_version"], 1)
        self.assertEqual(document["base"], "0x08000000")
        self.assertEqual(document["verdicts"]["mpu"], "present")
        self.assertEqual(set(document["features"]), {f.value for f in Feature})
        mpu = document["features"]["mpu"]
        self.assertTrue(mpu["applicable"])
        self.assertTrue(mpu["evidence"][0]["address"].startswith("0x0800"))

    def test_restored_matrix(self):
        restored = from_json(to_json(self.matrix))
        self.assertEqual(restored.verdicts, self.matrix.verdicts)
        self.assertEqual(restored.base, self.matrix.base)
        self.assertFalse(restored[Feature.READBACK_PROTECTION].applicable)

    def test_schema_errors(self):
        document = json.loads(to_json(self.matrix))
        bad = [
            "not json",
            "[]",
            json.dumps(dict(document, schema_version=2)),
            json.dumps({k: v for k, v in document.items() if k != "image"}),
            json.dumps(dict(document, features={"mpu": document["features"]["mpu"]})),
            json.dumps(dict(document, base="far away")),
        ]
        for text in bad:
            with self.subTest(text=text[:40]):
                with self.assertRaises(SchemaError):
                    from_json(text)


class TestTables(unittest.TestCase):
    """Text rendering."""

    def test_summary_table(self):
        corpus = [matrix(f"fw{n}") for n in range(3)]
        corpus.append(matrix("fw3", "nordic-nrf52", stack_separation=Verdict.PRESENT, readback_protection=NA))
        table = to_table(aggregate(corpus))
        lines = table.splitlines()
        self.assertEqual(lines[0].split(), ["Security", "Feature", "generic", "nordic-nrf52", "Total"])
        self.assertTrue(set(lines[1]) <= {"-", " "})
        self.assertEqual(lines[2].split()[-3:], ["3", "1", "4"])
        stack_row = next(line for line in lines if line.startswith("Stack Separation"))
        self.assertTrue(stack_row.endswith("1/4 25.00%"))
        self.assertIn("0/3 0.00%", stack_row)
        readback_row = next(line for line in lines if line.startswith("Readback Protection"))
        self.assertTrue(readback_row.endswith("0/3 0.00%"))
        self.assertTrue(table.rstrip().endswith("uses an RTOS)"))

    def test_matrix_summary(self):
        text = matrix_summary(matrix("fw.bin", mpu=Verdict.PRESENT, smpu=NA, errors=["vector table: truncated"]))
        self.assertIn("image:   fw.bin", text)
        self.assertIn("base:    unknown", text)
        mpu_line = next(line for line in text.splitlines() if "(MPU)" in line)
        self.assertTrue(mpu_line.rstrip().endswith("yes"))
        self.assertIn("? (n/a)", text)
        self.assertIn("error: vector table: truncated", text)

    def test_single_image_summary(self):
        summary = summarize_matrix(matrix("x"))
        self.assertEqual(summary.images, 1)


if __name__ == "__main__":
    unittest.main()

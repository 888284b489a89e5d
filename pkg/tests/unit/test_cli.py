"""
Unit tests for the command-line front end: argument parsing, exit codes
and the files each command writes.
"""

import contextlib
import io
import json
import os
import tempfile
import unittest

import yaml

from cli import EXIT_FATAL, EXIT_OK, EXIT_PARTIAL, parse_cli, run
from cli.commands import _load_kwargs
from config import ProfileRegistry, Settings
from ingest import Segment, encode_intel_hex, load_file

from tests import firmware


class CliTestCase(unittest.TestCase):
    """Runs commands inside a scratch directory with quiet logging."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.config = self.write_yaml("config.yaml", {
            "logging": {"level": "INFO", "dir": self.path("logs"), "file": None, "console": False},
        })

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def write_yaml(self, name: str, document) -> str:
        with open(self.path(name), "w") as f:
            yaml.safe_dump(document, f)
        return self.path(name)

    def write_bytes(self, name: str, data: bytes) -> str:
        with open(self.path(name), "wb") as f:
            f.write(data)
        return self.path(name)

    def cli(self, *argv: str):
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(io.StringIO()):
            code = run(["--config", self.config, *argv])
        return code, stdout.getvalue()


class TestParsing(unittest.TestCase):
    """Argument parsing into a CliConfig."""

    def test_analyze(self):
        cli = parse_cli(["-v", "analyze", "fw.bin", "--base", "0x8000000", "--format", "ihex", "--json", "-"])
        self.assertEqual(cli.command, "analyze")
        self.assertEqual(cli.inputs, ("fw.bin",))
        self.assertEqual(cli.base, 0x08000000)
        self.assertEqual(cli.format, "ihex")
        self.assertEqual(cli.output, "-")
        self.assertTrue(cli.verbose)

    def test_model_queries(self):
        cli = parse_cli(["model", "attr-resolve", "sau.yaml", "0x100", "4096"])
        self.assertEqual(cli.options["addresses"], [0x100, 4096])
        cli = parse_cli(["model", "mpu-eval", "mpu.yaml", "--addr", "0x20000000", "--access", "write"])
        self.assertEqual((cli.options["addr"], cli.options["access"], cli.options["priv"]),
                         (0x20000000, "write", "unprivileged"))

    def test_rejects_bad_arguments(self):
        bad = [
            [],
            ["analyze"],
            ["analyze", "fw.bin", "--base", "nowhere"],
            ["analyze", "fw.bin", "--base", "0x100000000"],
            ["analyze", "fw.bin", "--format", "elf"],
            ["model", "mpu-eval", "mpu.yaml", "--access", "fetch"],
        ]
        for argv in bad:
            with self.subTest(argv=argv):
                with contextlib.redirect_stderr(io.StringIO()), self.assertRaises(SystemExit):
                    parse_cli(argv)


class TestAnalyze(CliTestCase):
    """Single-image analysis."""

    def setUp(self):
        super().setUp()
        self.firmware = self.write_bytes("fw.bin", firmware.mpu_enabled().data)

    def test_summary_and_json_file(self):
        report = self.path("out/fw.json")
        code, stdout = self.cli("analyze", self.firmware, "--base", "0x08000000", "--json", report)
        self.assertEqual(code, EXIT_OK)
        self.assertIn(f"image:   {self.firmware}", stdout)
        with open(report) as f:
            document = json.load(f)
        self.assertEqual(document["base"], "0x08000000")
        self.assertEqual(document["verdicts"]["mpu"], "present")

    def test_json_on_stdout(self):
        code, stdout = self.cli("analyze", self.firmware, "--base", "0x08000000", "--json", "-")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(stdout)["image"], self.firmware)

    def test_stage_errors_are_partial(self):
        blank = self.write_bytes("blank.bin", bytes(32))
        code, stdout = self.cli("analyze", blank)
        self.assertEqual(code, EXIT_PARTIAL)
        self.assertIn("error:", stdout)

    def test_fatal_inputs(self):
        self.assertEqual(self.cli("analyze", self.path("missing.bin"))[0], EXIT_FATAL)
        self.assertEqual(self.cli("analyze", self.firmware, "--profile", "no-such-board")[0], EXIT_FATAL)
        broken = self.write_bytes("broken.hex", b":0400000001020304F1\n")
        self.assertEqual(self.cli("analyze", broken, "--format", "ihex")[0], EXIT_FATAL)


class TestProfileIngestOptions(CliTestCase):
    """Gap fill and auxiliary windows declared by the vendor profile."""

    def setUp(self):
        super().setUp()
        self.config = self.write_yaml("config.yaml", {
            "ingest": {"fill": 0xFF, "aux_windows": []},
            "logging": {"level": "INFO", "dir": self.path("logs"), "file": None, "console": False},
        })
        os.makedirs(self.path("profiles"))
        self.write_yaml("profiles/zero-fill.yaml", {"id": "zero-fill", "extends": "generic", "fill": 0})
        self.registry = ProfileRegistry(self.path("profiles"))
        code = firmware.bare().data
        self.gap_start = firmware.FLASH_BASE + len(code)
        self.gapped = self.write_bytes("gapped.hex", encode_intel_hex([
            Segment(firmware.FLASH_BASE, code),
            Segment(self.gap_start + 0x20, b"\x01\x02\x03\x04"),
        ]).encode())

    def gap_bytes(self, profile_id: str) -> bytes:
        kwargs = _load_kwargs(Settings(self.config), self.registry.get(profile_id))
        image = load_file(self.gapped, **kwargs)
        offset = self.gap_start - firmware.FLASH_BASE
        return image.data[offset:offset + 0x20]

    def test_profile_fill_overrides_setting(self):
        self.assertEqual(self.gap_bytes("zero-fill"), bytes(0x20))
        self.assertEqual(self.gap_bytes("generic"), b"\xff" * 0x20)

    def test_profile_fill_reaches_analyze(self):
        code, _ = self.cli("--profiles-dir", self.path("profiles"), "analyze", self.gapped, "--profile", "zero-fill")
        self.assertEqual(code, EXIT_OK)

    def test_profile_aux_windows_apply(self):
        """The UICR segment sits 128 MiB above flash; only the nRF52 window keeps it out of the merge."""
        uicr = firmware.uicr_segment(firmware.APPROTECT_OFFSET, 0xFFFFFF00)
        packaged = self.write_bytes("nrf.hex", encode_intel_hex([
            Segment(firmware.FLASH_BASE, firmware.bare().data), uicr,
        ]).encode())
        self.assertEqual(self.cli("analyze", packaged, "--profile", "generic")[0], EXIT_FATAL)
        code, stdout = self.cli("analyze", packaged, "--profile", "nordic-nrf52", "--json", "-")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(stdout)["verdicts"]["readback_protection"], "present")


class TestBatch(CliTestCase):
    """Corpus runs driven by a manifest."""

    def setUp(self):
        super().setUp()
        self.write_bytes("a.bin", firmware.mpu_enabled().data)
        self.write_bytes("b.bin", firmware.svc_gate().data)

    def manifest(self, *entries) -> str:
        return self.write_yaml("manifest.yaml", {"entries": list(entries)})

    def test_clean_corpus(self):
        manifest = self.manifest(
            {"path": "a.bin", "base": "0x08000000", "device": "board-1"},
            {"path": "b.bin", "base": 0x08000000, "profile": "nordic-nrf52"},
        )
        out = self.path("reports")
        code, stdout = self.cli("batch", manifest, "--out", out)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("Total", stdout)
        self.assertIn("nordic-nrf52", stdout)
        self.assertEqual(sorted(os.listdir(out)), ["0000-a.bin.json", "0001-b.bin.json", "summary.json"])
        with open(os.path.join(out, "summary.json")) as f:
            summary = json.load(f)
        self.assertEqual(summary["total"]["images"], 2)

    def test_results_are_deterministic(self):
        manifest = self.manifest({"path": "a.bin", "base": "0x08000000"}, {"path": "b.bin", "base": "0x08000000"})
        first, second = self.path("first"), self.path("second")
        self.cli("batch", manifest, "--out", first)
        self.cli("batch", manifest, "--out", second)
        for name in os.listdir(first):
            with open(os.path.join(first, name)) as f1, open(os.path.join(second, name)) as f2:
                self.assertEqual(f1.read(), f2.read(), name)

    def test_table_file(self):
        manifest = self.manifest({"path": "a.bin", "base": "0x08000000"})
        table = self.path("table.txt")
        code, stdout = self.cli("batch", manifest, "--table", table)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(stdout, "")
        with open(table) as f:
            self.assertIn("#F (firmware)", f.read())

    def test_failed_entries_are_partial(self):
        manifest = self.manifest(
            {"path": "a.bin", "base": "0x08000000"},
            {"path": "missing.bin"},
            {"path": "b.bin", "profile": "no-such-board"},
        )
        out = self.path("reports")
        code, _ = self.cli("batch", manifest, "--out", out)
        self.assertEqual(code, EXIT_PARTIAL)
        with open(os.path.join(out, "errors.log")) as f:
            errors = f.read().splitlines()
        self.assertEqual(len(errors), 2)

    def test_nothing_analyzable(self):
        manifest = self.manifest({"path": "missing.bin"})
        self.assertEqual(self.cli("batch", manifest)[0], EXIT_PARTIAL)

    def test_unreadable_manifest(self):
        self.assertEqual(self.cli("batch", self.path("nope.yaml"))[0], EXIT_FATAL)
        bad = self.write_yaml("bad.yaml", {"images": []})
        self.assertEqual(self.cli("batch", bad)[0], EXIT_FATAL)


class TestModel(CliTestCase):
    """Direct queries against the protection model."""

    def test_mpu_eval(self):
        config = self.write_yaml("mpu.yaml", {
            "arch": "v7m",
            "enable": True,
            "regions": [{"number": 0, "base": 0x20000000, "size": 0x10000, "ap": "rw/ro", "xn": True}],
            "queries": [
                {"addr": "0x20000010", "access": "read"},
                {"addr": "0x20000010", "access": "write"},
                {"addr": "0x20000010", "access": "write", "priv": "privileged"},
            ],
        })
        code, stdout = self.cli("model", "mpu-eval", config)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(stdout.splitlines(), [
            "0x20000010 read unprivileged: Allow",
            "0x20000010 write unprivileged: Deny",
            "0x20000010 write privileged: Allow",
        ])
        code, stdout = self.cli("model", "mpu-eval", config, "--addr", "0x20000000",
                                "--access", "execute", "--priv", "privileged")
        self.assertEqual(stdout, "0x20000000 execute privileged: Deny\n")

    def test_mpu_eval_invalid_config(self):
        config = self.write_yaml("mpu.yaml", {"arch": "v7m", "regions": [{"number": 0, "base": 0, "ap": "rw/rw"}]})
        self.assertEqual(self.cli("model", "mpu-eval", config)[0], EXIT_FATAL)

    def test_attr_resolve(self):
        config = self.write_yaml("sau.yaml", {
            "sau_enabled": True,
            "idau": [{"start": 0x10000000, "end": 0x1FFFFFFF, "attr": "secure"}],
            "sau": [{"start": 0x00000000, "end": 0x0003FFFF, "attr": "nonsecure"}],
        })
        code, stdout = self.cli("model", "attr-resolve", config, "0x100", "0x10000000", "0x40000")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(stdout.splitlines(), [
            "0x00000100: NonSecure (idau=NonSecure, sau=NonSecure)",
            "0x10000000: Secure (idau=Secure, sau=NonSecure)",
            "0x00040000: Secure (idau=NonSecure, sau=Secure)",
        ])

    def test_transition_script(self):
        script = self.write_yaml("script.yaml", {
            "start": {"privileged": True, "state": "secure", "spsel": "msp"},
            "events": ["svc", {"exception_return": {"mode": "thread", "spsel": "psp"}},
                       {"write_control_npriv": True}, "svc",
                       {"exception_return": {"mode": "thread", "spsel": "psp"}}],
        })
        code, stdout = self.cli("model", "transition", script)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(stdout.splitlines(), [
            "start: (thread, privileged, secure, msp)",
            "Svc: (handler, privileged, secure, msp)",
            "ExceptionReturn: (thread, privileged, secure, psp)",
            "WriteControlNPriv: (thread, unprivileged, secure, psp)",
            "Svc: (handler, privileged, secure, msp)",
            "ExceptionReturn: (thread, unprivileged, secure, psp)",
        ])

    def test_illegal_transition(self):
        script = self.write_yaml("script.yaml", {"start": {"state": "nonsecure"}, "events": ["bxns"]})
        code, stdout = self.cli("model", "transition", script)
        self.assertEqual(code, EXIT_FATAL)
        self.assertTrue(stdout.splitlines()[-1].startswith("illegal:"))

    def test_explore(self):
        script = self.write_yaml("script.yaml", {"start": {"privileged": False, "spsel": "psp"}})
        code, stdout = self.cli("model", "transition", script, "--explore", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("(thread, unprivileged, secure, psp)", stdout)
        self.assertIn("via escalation", stdout)


if __name__ == "__main__":
    unittest.main()

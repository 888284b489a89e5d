"""
Unit tests for the image layer: memory map, vector table, load-base
inference and the core feature ledger.
"""

import struct
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from image import (
    InvalidInitialSp,
    InvalidResetVector,
    NoViableBase,
    RegionClass,
    TableTruncated,
    classify_address,
    core_features,
    default_memory_map,
    infer_base_address,
    mpu_arch,
    parse_vector_table,
)
from ingest import FirmwareImage, load_raw

from tests.asm import Assembler
from tests.firmware import FLASH_BASE, INITIAL_SP, assemble, idle


def words(*values: int) -> bytes:
    return b"".join(struct.pack("<I", v) for v in values)


class TestMemoryMap(unittest.TestCase):
    """The fixed architectural address map."""

    def setUp(self):
        self.memory_map = default_memory_map()

    def test_classification(self):
        cases = {
            0x20001000: RegionClass.SRAM,
            0xE000ED00: RegionClass.SCS,
            0x08000000: RegionClass.CODE,
            0x00000000: RegionClass.CODE,
            0xFFFFFFFF: RegionClass.SYSTEM,
            0x40000000: RegionClass.PERIPHERAL,
            0x60000000: RegionClass.RAM_WB,
            0x80000000: RegionClass.RAM_WT,
            0xA0000000: RegionClass.DEVICE_SHARED,
            0xC0000000: RegionClass.DEVICE_PE,
            0xE0000000: RegionClass.PPB,
            0xE000F000: RegionClass.PPB,
        }
        for addr, expected in cases.items():
            with self.subTest(addr=hex(addr)):
                self.assertIs(classify_address(self.memory_map, addr), expected)

    def test_regions_tile_the_address_space(self):
        regions = self.memory_map.regions
        self.assertEqual(regions[0].start, 0)
        self.assertEqual(regions[-1].end, 0xFFFFFFFF)
        for a, b in zip(regions, regions[1:]):
            self.assertEqual(a.end + 1, b.start)

    def test_execute_never_defaults(self):
        self.assertFalse(self.memory_map.is_xn(0x08000000))
        self.assertFalse(self.memory_map.is_xn(0x20000100))
        self.assertTrue(self.memory_map.is_xn(0x40000000))
        self.assertTrue(self.memory_map.is_xn(0xE000ED94))

    def test_out_of_range(self):
        with self.assertRaises(ValueError):
            self.memory_map.classify(1 << 32)

    @given(st.integers(0, 0xFFFFFFFF))
    def test_every_address_has_exactly_one_region(self, addr):
        owners = [r for r in self.memory_map.regions if addr in r]
        self.assertEqual(len(owners), 1)
        self.assertIs(owners[0].region_class, self.memory_map.classify(addr))


class TestVectorTable(unittest.TestCase):
    """Vector-table parsing at a known base."""

    def test_direct_read(self):
        data = words(0x20002000, 0x000000C1, 0x000000D5) + bytes(0x100)
        table = parse_vector_table(load_raw(data, base=0))
        self.assertEqual(table.initial_sp, 0x20002000)
        self.assertEqual(table.reset, 0xC1)
        self.assertEqual(table.reset_entry, 0xC0)
        self.assertEqual(table.entry_points()[:2], [0xC0, 0xD4])

    def test_sp_in_code_region(self):
        data = words(0x08000000, 0xC1) + bytes(0x100)
        with self.assertRaises(InvalidInitialSp):
            parse_vector_table(load_raw(data, base=0))

    def test_even_reset(self):
        data = words(0x20002000, 0xC0) + bytes(0x100)
        with self.assertRaises(InvalidResetVector):
            parse_vector_table(load_raw(data, base=0))

    def test_reset_outside_image(self):
        data = words(0x20002000, 0x08000001) + bytes(0x100)
        with self.assertRaises(InvalidResetVector):
            parse_vector_table(load_raw(data, base=0))

    def test_truncated(self):
        with self.assertRaises(TableTruncated):
            parse_vector_table(load_raw(b"\x00\x20\x00", base=0))

    def test_synthetic_table(self):
        image = FirmwareImage(assemble(idle), base=FLASH_BASE)
        table = parse_vector_table(image)
        self.assertEqual(table.initial_sp, INITIAL_SP)
        # 31 vectors after the SP; the default handler code ends the table
        self.assertEqual(len(table.handlers), 30)
        self.assertEqual(table.handlers[5], 0)  # slot 7 is reserved
        self.assertEqual(sorted(table.entry_points()), [FLASH_BASE + 0x80, FLASH_BASE + 0x82])

    def test_handler_names(self):
        table = parse_vector_table(FirmwareImage(assemble(idle), base=FLASH_BASE))
        self.assertEqual(table.handler_name(1), "Reset")
        self.assertEqual(table.handler_name(11), "SVCall")
        self.assertEqual(table.handler_name(8), "Reserved8")
        self.assertEqual(table.handler_name(17), "IRQ1")


class TestBaseInference(unittest.TestCase):
    """Load-base recovery for raw images."""

    def test_recovers_flash_base(self):
        image = FirmwareImage(assemble(idle, base=FLASH_BASE))
        candidate = infer_base_address(image)
        self.assertEqual(candidate.base, FLASH_BASE)
        self.assertGreater(candidate.score, 0)

    def test_misaligned_sp(self):
        data = words(0x00000001) + bytes(0x100)
        with self.assertRaises(NoViableBase):
            infer_base_address(load_raw(data))

    def test_too_small(self):
        with self.assertRaises(NoViableBase):
            infer_base_address(load_raw(words(INITIAL_SP, 0x41)))

    def test_even_vectors(self):
        data = words(INITIAL_SP, *([0x100] * 16)) + bytes(0x100)
        with self.assertRaises(NoViableBase):
            infer_base_address(load_raw(data))

    def test_tie_goes_to_lower_base(self):
        # no odd words besides the vectors: every viable base scores the same
        data = words(INITIAL_SP, *([0x2001] * 16)) + bytes(0x3000 - 68)
        candidate = infer_base_address(load_raw(data), candidates=[0x1000, 0x800, 0x1800])
        self.assertEqual(candidate.base, 0x800)

    def test_explicit_candidates_outside_range(self):
        image = FirmwareImage(assemble(idle, base=FLASH_BASE))
        with self.assertRaises(NoViableBase):
            infer_base_address(image, candidates=[0x0, 0x10000])

    def test_declared_base_is_considered(self):
        image = FirmwareImage(assemble(idle, base=0x08000200))
        candidate = infer_base_address(image, declared=0x08000200)
        self.assertEqual(candidate.base, 0x08000200)

    @settings(max_examples=20, deadline=None)
    @given(
        base=st.sampled_from([0x0, 0x4000, 0x26000, 0x08000000, 0x10000000]),
        handlers=st.lists(st.integers(0, 6), min_size=1, max_size=4),
        padding=st.integers(0, 24),
    )
    def test_randomized_images(self, base, handlers, padding):
        """Images with a varying number of handlers of varying length land back at their base."""
        def build() -> bytes:
            a = Assembler(base)
            a.word(INITIAL_SP)
            names = [f"h{n}" for n in range(len(handlers))]
            for n in range(1, 32):
                a.word(names[n % len(names)] if n != 1 else "reset", thumb=True)
            a.label("reset").nop().loop()
            for name, length in zip(names, handlers):
                a.label(name).push(4, 14).nop(length).pop(4, 15)
            a.nop(padding)
            return a.assemble()

        candidate = infer_base_address(FirmwareImage(build()))
        self.assertEqual(candidate.base, base)


class TestCores(unittest.TestCase):
    """Core feature ledger."""

    def test_lookup(self):
        m33 = core_features("Cortex-M33")
        self.assertTrue(m33.trustzone)
        self.assertTrue(m33.stack_limit)
        self.assertEqual(m33.max_sau_regions, 8)
        self.assertFalse(core_features("cortex-m0").unprivileged_ldst)
        self.assertIsNone(core_features("cortex-a9"))
        self.assertIsNone(core_features(None))

    def test_mpu_arch(self):
        self.assertEqual(mpu_arch("cortex-m4"), "v7m")
        self.assertEqual(mpu_arch("cortex-m55"), "v8m")
        self.assertEqual(mpu_arch(None), "v7m")


if __name__ == "__main__":
    unittest.main()

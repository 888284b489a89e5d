"""
Unit tests for firmware ingest.

Covers the raw, Intel HEX and S-record decoders, segment merging,
auxiliary-segment splitting and manifest-driven corpus walks.
"""

import os
import shutil
import tempfile
import unittest

from hypothesis import given
from hypothesis import strategies as st

from ingest import (
    BadChecksum,
    BadRecordType,
    CorpusManifest,
    EmptyInput,
    GapTooLarge,
    IngestError,
    ManifestEntry,
    ManifestError,
    OverlappingSegments,
    Segment,
    SourceFormat,
    TruncatedRecord,
    decode_intel_hex,
    decode_srecord,
    detect_format,
    encode_intel_hex,
    encode_srecord,
    load_firmware,
    load_manifest,
    load_raw,
    merge_segments,
    parse_manifest,
    split_aux_segments,
    walk_corpus,
)


@st.composite
def segment_lists(draw, base=st.just(0)):
    """Ascending, non-touching segments starting at a drawn address."""
    chunks = draw(st.lists(st.tuples(st.integers(0, 0x3FF), st.binary(min_size=1, max_size=40)),
                           min_size=1, max_size=6))
    segments, cursor = [], draw(base)
    for gap, data in chunks:
        start = cursor + gap + 1 if segments else cursor + gap
        segments.append(Segment(start, data))
        cursor = start + len(data)
    return segments


class TestRawImages(unittest.TestCase):
    """Raw binaries wrap bytes without interpretation."""

    def test_raw_with_base(self):
        image = load_raw(bytes(1024), base=0x0)
        self.assertEqual(len(image), 1024)
        self.assertEqual(image.base, 0x0)
        self.assertIs(image.source_format, SourceFormat.RAW)

    def test_raw_without_base(self):
        image = load_raw(b"\x00\x80\x00\x20")
        self.assertIsNone(image.base)
        self.assertFalse(image.contains(0, 4))

    def test_empty_input(self):
        with self.assertRaises(EmptyInput):
            load_raw(b"")
        with self.assertRaises(EmptyInput):
            load_firmware(b"")

    def test_reads_are_absolute(self):
        image = load_raw(bytes(range(16)), base=0x08000000)
        self.assertEqual(image.read_u32(0x08000004), 0x07060504)
        self.assertEqual(image.read_u16(0x0800000E), 0x0F0E)
        self.assertIsNone(image.read_u32(0x0800000E))
        self.assertIsNone(image.read(0x07FFFFFF, 2))

    def test_image_id_prefers_path(self):
        image = load_raw(b"\x01\x02").with_metadata(path="fw/app.bin")
        self.assertEqual(image.image_id, "fw/app.bin")
        self.assertEqual(len(load_raw(b"\x01\x02").image_id), 16)


class TestIntelHex(unittest.TestCase):
    """Intel HEX decoding through the intelhex package."""

    def test_single_data_record(self):
        decoded = decode_intel_hex(":0400000001020304F2\n:00000001FF\n")
        self.assertEqual(len(decoded), 1)
        self.assertEqual(decoded[0].start, 0x0)
        self.assertEqual(decoded[0].data, b"\x01\x02\x03\x04")

    def test_extended_linear_address(self):
        text = ":020000040800F2\n:0400000001020304F2\n:00000001FF\n"
        decoded = decode_intel_hex(text)
        self.assertEqual(decoded[0].start, 0x08000000)

    def test_bad_checksum(self):
        with self.assertRaises(BadChecksum):
            decode_intel_hex(":0400000001020304F3\n:00000001FF\n")

    def test_bad_record_type(self):
        with self.assertRaises(BadRecordType):
            decode_intel_hex(":00000009F7\n")

    def test_truncated_record(self):
        with self.assertRaises(TruncatedRecord):
            decode_intel_hex(":0400000001\n")

    def test_blank_text(self):
        with self.assertRaises(EmptyInput):
            decode_intel_hex("  \n")

    def test_aux_window_kept_apart(self):
        text = encode_intel_hex([
            Segment(0x0, b"\xAA" * 16),
            Segment(0x10001208, b"\x00\xFF\xFF\xFF"),
        ])
        image = load_firmware(text.encode(), aux_windows=[(0x10001000, 0x10001FFF)])
        self.assertIs(image.source_format, SourceFormat.INTEL_HEX)
        self.assertEqual(len(image), 16)
        self.assertEqual(image.base, 0x0)
        self.assertEqual(image.read_u32(0x10001208), 0xFFFFFF00)
        self.assertIn("aux_segments", image.metadata)

    def test_explicit_base_overrides_segment_address(self):
        text = encode_intel_hex([Segment(0x100, b"\x01\x02\x03\x04")])
        self.assertEqual(load_firmware(text.encode()).base, 0x100)
        self.assertEqual(load_firmware(text.encode(), base=0x08000000).base, 0x08000000)

    @given(segment_lists(base=st.integers(0, 0x7FF).map(lambda n: n * 0x10000 + 0xFFE0)))
    def test_decode_recovers_encoded_segments(self, segments):
        """Segments laid just below a 64 KiB boundary force extended linear address records."""
        decoded = decode_intel_hex(encode_intel_hex(segments))
        self.assertEqual([(s.start, s.data) for s in decoded], [(s.start, s.data) for s in segments])

    @given(segment_lists(base=st.integers(0, 0xFFFF)), st.data())
    def test_single_bit_flip_fails_checksum(self, segments, data):
        lines = encode_intel_hex(segments).splitlines()
        records = [n for n, line in enumerate(lines) if line[7:9] == "00"]
        n = data.draw(st.sampled_from(records))
        line = lines[n]
        length = int(line[1:3], 16)
        # address, payload and checksum bytes; length and type are validated before the checksum
        position = data.draw(st.sampled_from([1, 2] + list(range(4, 4 + length)) + [4 + length]))
        bit = data.draw(st.integers(0, 7))
        flipped = int(line[1 + 2 * position:3 + 2 * position], 16) ^ (1 << bit)
        lines[n] = f"{line[:1 + 2 * position]}{flipped:02X}{line[3 + 2 * position:]}"
        with self.assertRaises(BadChecksum):
            decode_intel_hex("\n".join(lines) + "\n")


class TestSRecord(unittest.TestCase):
    """Motorola S-record decoding."""

    def test_s1_data_record(self):
        decoded = decode_srecord("S1060000AABBCCC8\n")
        self.assertEqual(len(decoded), 1)
        self.assertEqual(decoded[0].start, 0x0000)
        self.assertEqual(decoded[0].data, b"\xAA\xBB\xCC")

    def test_start_record(self):
        decoded = decode_srecord("S9030000FC\n")
        self.assertEqual(len(decoded), 0)
        self.assertEqual(decoded.start_address, 0x0)

    def test_count_record_ignored(self):
        decoded = decode_srecord("S1060000AABBCCC8\nS5030001FB\nS9030000FC\n")
        self.assertEqual(decoded[0].data, b"\xAA\xBB\xCC")

    def test_bad_checksum(self):
        with self.assertRaises(BadChecksum):
            decode_srecord("S1060000AABBCCC9\n")

    def test_unknown_record_type(self):
        with self.assertRaises(BadRecordType):
            decode_srecord("S4030000FC\n")

    def test_count_mismatch(self):
        with self.assertRaises(TruncatedRecord):
            decode_srecord("S1050000AABBCCC8\n")

    def test_overlap(self):
        first = encode_srecord([Segment(0x0, b"\x01\x02\x03\x04")]).splitlines()[1]
        second = encode_srecord([Segment(0x2, b"\x05\x06")]).splitlines()[1]
        with self.assertRaises(OverlappingSegments):
            decode_srecord(f"{first}\n{second}\n")

    def test_header_and_start_into_metadata(self):
        text = encode_srecord([Segment(0x0, b"\x00\x80\x00\x20")], header="app", start_address=0xC1)
        image = load_firmware(text.encode())
        self.assertIs(image.source_format, SourceFormat.SRECORD)
        self.assertEqual(image.metadata["header"], "app")
        self.assertEqual(image.metadata["start_address"], "0x000000c1")

    @given(segment_lists())
    def test_decode_recovers_encoded_segments(self, segments):
        decoded = decode_srecord(encode_srecord(segments))
        self.assertEqual([(s.start, s.data) for s in decoded], [(s.start, s.data) for s in segments])


class TestFormatDetection(unittest.TestCase):
    """Container sniffing on the first two bytes."""

    def test_detection(self):
        self.assertIs(detect_format(b":100000"), SourceFormat.INTEL_HEX)
        self.assertIs(detect_format(b"S00F0000"), SourceFormat.SRECORD)
        self.assertIs(detect_format(b"\n  S1060000"), SourceFormat.SRECORD)
        self.assertIs(detect_format(b"\x00\x80\x00\x20"), SourceFormat.RAW)
        self.assertIs(detect_format(b"Sx"), SourceFormat.SRECORD)
        self.assertIs(detect_format(b":"), SourceFormat.INTEL_HEX)
        self.assertIs(detect_format(b"\x20\x00"), SourceFormat.RAW)

    def test_corrupt_containers_are_errors_not_raw(self):
        """A leading ':' or 'S' commits to the text format, so damage after it is reported."""
        for data, error in ((b":Z40000000102030400\n", TruncatedRecord), (b":\n", TruncatedRecord),
                            (b"Sx0000\n", BadRecordType), (b"S1GG\n", TruncatedRecord)):
            with self.subTest(data=data):
                with self.assertRaises(error):
                    load_firmware(data)

    @given(st.sampled_from(":S"), st.binary(max_size=40))
    def test_leading_marker_never_loads_as_raw(self, marker, rest):
        try:
            image = load_firmware(marker.encode() + rest)
        except IngestError:
            return
        self.assertIsNot(image.source_format, SourceFormat.RAW)


class TestMerge(unittest.TestCase):
    """Flattening segments into one image."""

    def test_gap_is_filled(self):
        image = merge_segments([Segment(0x4, b"B"), Segment(0x0, b"A")], fill=0xFF)
        self.assertEqual(image.base, 0x0)
        self.assertEqual(image.data, b"A\xff\xff\xffB")

    def test_single_segment(self):
        image = merge_segments([Segment(0x08000000, b"\x01\x02\x03")])
        self.assertEqual(image.base, 0x08000000)
        self.assertEqual(image.data, b"\x01\x02\x03")

    def test_gap_cap(self):
        with self.assertRaises(GapTooLarge):
            merge_segments([Segment(0x0, b"\x00"), Segment(0x20000000, b"\x00")])

    def test_overlap(self):
        with self.assertRaises(OverlappingSegments):
            merge_segments([Segment(0x0, b"\x00\x00"), Segment(0x1, b"\x00")])

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            merge_segments([])

    def test_split_cuts_straddling_segment(self):
        main, aux = split_aux_segments([Segment(0x0FFC, bytes(8))], [(0x1000, 0x1FFF)])
        self.assertEqual([(s.start, len(s.data)) for s in main], [(0x0FFC, 4)])
        self.assertEqual([(s.start, len(s.data)) for s in aux], [(0x1000, 4)])


class TestCorpus(unittest.TestCase):
    """Manifest parsing and corpus enumeration."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def _write(self, name: str, data: bytes) -> str:
        path = os.path.join(self.temp_dir, name)
        with open(path, "wb") as handle:
            handle.write(data)
        return path

    def _manifest(self, body: str) -> str:
        return self._write("manifest.yaml", body.encode())

    def test_three_raw_files(self):
        for n in range(3):
            self._write(f"fw{n}.bin", bytes([n]) * 64)
        path = self._manifest(
            "entries:\n"
            "  - {path: fw0.bin, profile: generic, device: board-a, base: 0x0}\n"
            "  - {path: fw1.bin, profile: nordic-nrf52, device: board-b}\n"
            "  - {path: fw2.bin, format: raw}\n"
        )
        images = list(walk_corpus(load_manifest(path)))
        self.assertEqual(len(images), 3)
        self.assertEqual(images[0].profile_id, "generic")
        self.assertEqual(images[0].device_id, "board-a")
        self.assertIsNone(images[0].base)
        self.assertEqual(images[0].declared_base, 0x0)
        self.assertIsNone(images[1].declared_base)
        self.assertEqual(images[1].profile_id, "nordic-nrf52")
        self.assertIsNone(images[2].device_id)
        self.assertTrue(images[2].image_id.endswith("fw2.bin"))

    def test_corrupt_entry_is_recorded(self):
        self._write("a.bin", bytes(64))
        self._write("bad.hex", b":0400000001020304F3\n:00000001FF\n")
        self._write("c.bin", bytes(64))
        path = self._manifest("entries:\n  - path: a.bin\n  - path: bad.hex\n  - path: c.bin\n")
        errors = []
        images = list(walk_corpus(load_manifest(path), errors))
        self.assertEqual(len(images), 2)
        self.assertEqual(len(errors), 1)
        self.assertTrue(errors[0].entry.path.endswith("bad.hex"))
        self.assertIsInstance(errors[0].error, BadChecksum)

    def test_declared_base_places_containers(self):
        self._write("fw.hex", encode_intel_hex([Segment(0x0, bytes(16))]).encode())
        path = self._manifest("entries:\n  - {path: fw.hex, base: 0x08000000}\n")
        image, = walk_corpus(load_manifest(path))
        self.assertEqual(image.base, 0x08000000)
        self.assertEqual(image.declared_base, 0x08000000)

    def test_srecord_autodetected(self):
        self._write("fw.s19", encode_srecord([Segment(0x0, bytes(16))]).encode())
        path = self._manifest("entries:\n  - path: fw.s19\n")
        image, = walk_corpus(load_manifest(path))
        self.assertIs(image.source_format, SourceFormat.SRECORD)

    def test_missing_file_is_recorded(self):
        path = self._manifest("entries:\n  - path: missing.bin\n")
        errors = []
        self.assertEqual(list(walk_corpus(load_manifest(path), errors)), [])
        self.assertEqual(len(errors), 1)

    def test_malformed_manifests(self):
        with self.assertRaises(ManifestError):
            parse_manifest({"images": []})
        with self.assertRaises(ManifestError):
            parse_manifest({"entries": [{"profile": "generic"}]})
        with self.assertRaises(ManifestError):
            parse_manifest({"entries": [{"path": "a.bin", "format": "elf"}]})
        with self.assertRaises(ManifestError):
            parse_manifest({"entries": [{"path": "a.bin"}, {"path": "a.bin"}]})
        with self.assertRaises(ManifestError):
            load_manifest(os.path.join(self.temp_dir, "absent.yaml"))

    def test_relative_paths_resolve_against_manifest(self):
        manifest = parse_manifest({"entries": [{"path": "sub/x.bin", "base": "0x1000"}]}, root="/corpus")
        self.assertEqual(manifest.entries[0].path, os.path.normpath("/corpus/sub/x.bin"))
        self.assertEqual(manifest.entries[0].base, 0x1000)

    def test_duplicate_paths_rejected_by_model(self):
        with self.assertRaises(ValueError):
            CorpusManifest(entries=(ManifestEntry("a"), ManifestEntry("a")))


if __name__ == "__main__":
    unittest.main()

"""
Command-line front end.

    cm-scope [--config FILE] [--profiles-dir DIR] [-v] [--log-file NAME] COMMAND ...

    analyze FILE [--base ADDR] [--format raw|ihex|srec] [--profile ID] [--alignment N] [--json PATH|-]
    batch MANIFEST [--jobs N] [--out DIR] [--table PATH]
    model mpu-eval CONFIG [--addr ADDR --access read|write|execute --priv privileged|unprivileged]
    model attr-resolve CONFIG ADDR [ADDR ...]
    model transition CONFIG [--explore DEPTH]

Exit codes: 0 success, 2 partial (some entries or stages failed), 1 fatal.
Results go to stdout, diagnostics to stderr.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

from config.patterns import PatternSet, load_patterns
from config.profiles import DEFAULT_PROFILE_ID, ProfileRegistry, VendorProfile, load_profiles
from config.settings import Settings
from detectors.pipeline import run_all
from ingest.corpus import load_entry, load_manifest, parse_format
from ingest.errors import IngestError
from ingest.loader import load_file
from ingest.model import ManifestEntry
from report.errors import EmptyCorpus
from report.json_report import from_json, to_json
from report.summary import aggregate, summary_to_dict
from report.table import matrix_summary, to_table
from secmodel.attribution import idau_attribution, resolve_attribution, sau_attribution
from secmodel.context import explore, step_security_context
from secmodel.errors import IllegalTransition
from secmodel.loader import (
    attribution_from_dict,
    mpu_config_from_dict,
    parse_int,
    read_document,
    transition_script_from_dict,
)
from secmodel.mpu import Access, Privilege, eval_mpu_access
from utils.errors import CmScopeError
from utils.logger import setup_application_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


@dataclass(frozen=True)
class CliConfig:
    """One parsed invocation: exactly one subcommand plus its inputs."""
    command: str
    inputs: Tuple[str, ...]
    base: Optional[int] = None
    format: Optional[str] = None
    profile: Optional[str] = None
    output: Optional[str] = None
    verbose: bool = False
    config_path: str = "config.yaml"
    profiles_dir: Optional[str] = None
    log_file: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)


def _address(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an address: {text!r}")
    if not 0 <= value < 1 << 32:
        raise argparse.ArgumentTypeError(f"address out of range: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cm-scope",
        description="Static security-feature analysis of Cortex-M firmware images",
    )
    parser.add_argument("--config", default="config.yaml", help="settings file (default: config.yaml)")
    parser.add_argument("--profiles-dir", help="directory of extra vendor profiles (overrides CM_SCOPE_PROFILES)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--log-file", help="also log to this file inside the configured log directory")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="analyze one firmware image")
    analyze.add_argument("file")
    analyze.add_argument("--base", type=_address, help="load address; skips base inference")
    analyze.add_argument("--format", choices=["raw", "ihex", "srec"], help="container format (default: detect)")
    analyze.add_argument("--profile", help="vendor profile id")
    analyze.add_argument("--alignment", type=_address, help="base-inference candidate alignment")
    analyze.add_argument("--json", dest="output", help="write the JSON report here ('-' for stdout)")

    batch = commands.add_parser("batch", help="analyze every entry of a corpus manifest")
    batch.add_argument("manifest")
    batch.add_argument("--jobs", type=int, help="worker processes")
    batch.add_argument("--out", dest="output", help="directory for per-image JSON reports")
    batch.add_argument("--table", help="write the summary table here instead of stdout")
    batch.add_argument("--profile", help="profile for entries that name none")

    model = commands.add_parser("model", help="query the protection model directly")
    queries = model.add_subparsers(dest="query", required=True)
    mpu_eval = queries.add_parser("mpu-eval", help="evaluate MPU accesses")
    mpu_eval.add_argument("config_file")
    mpu_eval.add_argument("--addr", type=_address)
    mpu_eval.add_argument("--access", choices=[a.value for a in Access], default=Access.READ.value)
    mpu_eval.add_argument("--priv", choices=[p.value for p in Privilege], default=Privilege.UNPRIVILEGED.value)
    attr = queries.add_parser("attr-resolve", help="resolve SAU/IDAU security attribution")
    attr.add_argument("config_file")
    attr.add_argument("addresses", nargs="*", type=_address)
    transition = queries.add_parser("transition", help="replay privilege/security-state events")
    transition.add_argument("config_file")
    transition.add_argument("--explore", type=int, metavar="DEPTH",
                            help="list every context reachable within DEPTH events")
    return parser


def parse_cli(argv: Optional[Sequence[str]] = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    common = dict(
        verbose=args.verbose,
        config_path=args.config,
        profiles_dir=args.profiles_dir,
        log_file=args.log_file,
    )
    if args.command == "analyze":
        return CliConfig("analyze", (args.file,), base=args.base, format=args.format, profile=args.profile,
                         output=args.output, options={"alignment": args.alignment}, **common)
    if args.command == "batch":
        return CliConfig("batch", (args.manifest,), profile=args.profile, output=args.output,
                         options={"jobs": args.jobs, "table": args.table}, **common)
    options = {"query": args.query}
    inputs = (args.config_file,)
    if args.query == "mpu-eval":
        options.update(addr=args.addr, access=args.access, priv=args.priv)
    elif args.query == "attr-resolve":
        options.update(addresses=args.addresses)
    else:
        options.update(explore=args.explore)
    return CliConfig("model", inputs, options=options, **common)


def _registry(cli: CliConfig, settings: Settings) -> ProfileRegistry:
    return load_profiles(settings.profiles_dir(cli.profiles_dir))


def _default_profile(cli: CliConfig, settings: Settings) -> str:
    return cli.profile or settings.config["profiles"].get("default") or DEFAULT_PROFILE_ID


def _load_kwargs(settings: Settings, profile: VendorProfile) -> Dict[str, Any]:
    kwargs = profile.ingest_options(int(settings.ingest.get("fill", 0xFF)), settings.aux_windows)
    kwargs["max_gap"] = int(settings.ingest.get("max_gap", 16 * 1024 * 1024))
    return kwargs


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as handle:
        handle.write(text)


def cmd_analyze(cli: CliConfig, settings: Settings) -> int:
    path = cli.inputs[0]
    if not os.path.isfile(path):
        logger.error(f"no such file: {path}")
        return EXIT_FATAL
    if cli.options.get("alignment"):
        settings.analysis["base_alignment"] = cli.options["alignment"]

    profile = _registry(cli, settings).get(_default_profile(cli, settings))
    image = load_file(path, format_hint=parse_format(cli.format), base=cli.base, **_load_kwargs(settings, profile))
    matrix = run_all(image, profile, settings)

    if cli.output != "-":
        sys.stdout.write(matrix_summary(matrix))
    if cli.output:
        _write_text(cli.output, to_json(matrix) + "\n")
        if cli.output != "-":
            logger.info(f"JSON report written to {cli.output}")
    return EXIT_PARTIAL if matrix.errors else EXIT_OK


def analyze_entry(job: Tuple[ManifestEntry, VendorProfile, Settings, PatternSet]) -> Tuple[Optional[str], Optional[str]]:
    """
    Worker body for batch analysis: (JSON report, error message).

    Returns text rather than objects so that process workers and the
    in-process path produce byte-identical results.
    """
    entry, profile, settings, patterns = job
    try:
        image = load_entry(entry, **_load_kwargs(settings, profile))
    except (IngestError, OSError) as e:
        return None, f"{entry.path}: {type(e).__name__}: {e}"
    return to_json(run_all(image, profile, settings, patterns)), None


def _report_name(number: int, entry: ManifestEntry) -> str:
    return f"{number:04d}-{os.path.basename(entry.path)}.json"


def cmd_batch(cli: CliConfig, settings: Settings) -> int:
    manifest = load_manifest(cli.inputs[0])
    registry = _registry(cli, settings)
    patterns = load_patterns()
    default_profile = _default_profile(cli, settings)
    jobs = cli.options.get("jobs") or int(settings.config["batch"].get("jobs", 1))

    work, failures = [], []
    for entry in manifest:
        try:
            work.append((entry, registry.get(entry.profile or default_profile), settings, patterns))
        except CmScopeError as e:
            failures.append(f"{entry.path}: {e}")

    logger.info(f"analyzing {len(work)} image(s) with {jobs} job(s)")
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(analyze_entry, work))
    else:
        results = [analyze_entry(job) for job in work]

    matrices = []
    for number, ((entry, *_), (document, error)) in enumerate(zip(work, results)):
        if error is not None:
            failures.append(error)
            continue
        matrix = from_json(document)
        matrices.append(matrix)
        if matrix.errors:
            failures.extend(f"{entry.path}: {e}" for e in matrix.errors)
        if cli.output:
            _write_text(os.path.join(cli.output, _report_name(number, entry)), document + "\n")

    for failure in failures:
        logger.error(failure)
    try:
        summary = aggregate(matrices)
    except EmptyCorpus:
        logger.error("no image in the manifest could be analyzed")
        return EXIT_PARTIAL if len(manifest) else EXIT_FATAL

    table = to_table(summary)
    _write_text(cli.options.get("table") or "-", table)
    if cli.output:
        _write_text(os.path.join(cli.output, "summary.json"),
                    json.dumps(summary_to_dict(summary), indent=2, sort_keys=True) + "\n")
        if failures:
            _write_text(os.path.join(cli.output, "errors.log"), "\n".join(failures) + "\n")
    return EXIT_PARTIAL if failures else EXIT_OK


def _model_mpu_eval(cli: CliConfig) -> int:
    document = read_document(cli.inputs[0])
    cfg = mpu_config_from_dict(document)
    options = cli.options
    if options.get("addr") is not None:
        queries = [{"addr": options["addr"], "access": options["access"], "priv": options["priv"]}]
    else:
        queries = document.get("queries") or []
    for query in queries:
        addr = parse_int(query["addr"], "query address")
        access = Access(str(query.get("access", "read")).lower())
        priv = Privilege(str(query.get("priv", "unprivileged")).lower())
        decision = eval_mpu_access(cfg, None, addr, priv, access)
        print(f"0x{addr:08x} {access.value} {priv.value}: {decision.value.capitalize()}")
    return EXIT_OK


def _model_attr_resolve(cli: CliConfig) -> int:
    cfg = attribution_from_dict(read_document(cli.inputs[0]))
    for addr in cli.options.get("addresses") or []:
        attr = resolve_attribution(cfg, addr)
        print(f"0x{addr:08x}: {attr.label} "
              f"(idau={idau_attribution(cfg, addr).label}, sau={sau_attribution(cfg, addr).label})")
    return EXIT_OK


def _model_transition(cli: CliConfig) -> int:
    start, events = transition_script_from_dict(read_document(cli.inputs[0]))
    depth = cli.options.get("explore")
    if depth is not None:
        reachable = explore(start, depth)
        for ctx, escalated in sorted(reachable, key=lambda pair: (str(pair[0]), pair[1])):
            print(f"{ctx}{' via escalation' if escalated else ''}")
        return EXIT_OK

    ctx = start
    print(f"start: {ctx}")
    for event in events:
        try:
            ctx = step_security_context(ctx, event)
        except IllegalTransition as e:
            print(f"illegal: {e}")
            return EXIT_FATAL
        print(f"{type(event).__name__}: {ctx}")
    return EXIT_OK


def cmd_model(cli: CliConfig) -> int:
    query = cli.options["query"]
    if query == "mpu-eval":
        return _model_mpu_eval(cli)
    if query == "attr-resolve":
        return _model_attr_resolve(cli)
    return _model_transition(cli)


def run(argv: Optional[Sequence[str]] = None) -> int:
    cli = parse_cli(argv)
    settings = Settings(cli.config_path)
    setup_application_logging(settings.config, verbose=cli.verbose, log_file=cli.log_file)
    try:
        if cli.command == "analyze":
            return cmd_analyze(cli, settings)
        if cli.command == "batch":
            return cmd_batch(cli, settings)
        return cmd_model(cli)
    except CmScopeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FATAL
    except OSError as e:
        logger.error(f"{e}")
        return EXIT_FATAL

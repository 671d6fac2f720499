# -*- coding: utf-8 -*-
"""
MVSC-HFD Multi-view Subspace Clustering
コマンドラインエントリポイント
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from threadpoolctl import threadpool_limits

from config.languages import LANGUAGES, get_text
from config.settings import (
    APP_CONFIG, BENCHMARK_CONFIG, DATASET_CONFIG, EMBEDDING_CONFIG, EXIT_CODES, METRICS_CONFIG,
    MODEL_CONFIG, OPTIMIZER_CONFIG, get_current_language, get_thread_limit, setup_logging
)
from modules.cli import (
    RunConfig, cmd_benchmark, cmd_eval, cmd_fit, cmd_gen, cmd_sweep_depth, parse_synthetic_spec
)
from modules.dataset import SyntheticSpec, dataset_summary
from modules.errors import MVSCError, ValidationError
from utils.export_utils import write_table

logger = logging.getLogger(__name__)


def _int_list(value: str) -> List[int]:
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{value}'") from exc

def build_parser() -> argparse.ArgumentParser:
    """引数パーサを作成"""
    parser = argparse.ArgumentParser(prog=APP_CONFIG["prog"], description=get_text("app_title", "en"))
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_CONFIG['version']}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lang", choices=list(LANGUAGES.values()), default=None)
    common.add_argument("--log-level", default=None, help="DEBUG / INFO / WARNING / ERROR")
    common.add_argument("--threads", type=int, default=None,
                        help="view-parallel workers (default from MVSC_HFD_THREADS)")
    common.add_argument("--out", type=Path, default=None)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", type=Path, default=None, help="dataset directory or .mat file")
    data.add_argument("--synthetic", default=None, help="synthetic spec (JSON file or inline JSON)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--clusters", type=int, default=None)
    model.add_argument("--anchors", type=int, default=None)
    model.add_argument("--depth", type=int, default=MODEL_CONFIG["default_depth"])
    model.add_argument("--norm", default=DATASET_CONFIG["default_normalization"].replace("_", "-"),
                       choices=[mode.replace("_", "-") for mode in DATASET_CONFIG["normalization_modes"]])
    model.add_argument("--max-iter", type=int, default=OPTIMIZER_CONFIG["max_iter"])
    model.add_argument("--tol", type=float, default=OPTIMIZER_CONFIG["rel_tol"])
    model.add_argument("--seed", type=int, default=0)
    model.add_argument("--restarts", type=int, default=EMBEDDING_CONFIG["kmeans_restarts"])
    model.add_argument("--no-degree-norm", action="store_true")
    model.add_argument("--nmi-average", default=METRICS_CONFIG["nmi_average_default"],
                       choices=METRICS_CONFIG["nmi_average_methods"])
    model.add_argument("--debug-trace", action="store_true",
                       help="log the objective after every sub-step (DEBUG)")

    synth = argparse.ArgumentParser(add_help=False)
    synth.add_argument("--n", type=int, default=None)
    synth.add_argument("--k-true", type=int, default=None)
    synth.add_argument("--dims", type=_int_list, default=None)
    synth.add_argument("--separation", type=float, default=None)
    synth.add_argument("--noise", type=float, default=None)
    synth.add_argument("--seed", type=int, default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    fit_parser = sub.add_parser("fit", parents=[common, data, model], help="fit, embed, cluster and evaluate")
    fit_parser.add_argument("--init-state", type=Path, default=None,
                            help="resume from a saved state directory (<out>.state from an earlier fit)")

    bench = sub.add_parser("benchmark", parents=[common, data, synth], help="per-sweep time and memory by n")
    bench.add_argument("--sizes", type=_int_list, default=list(BENCHMARK_CONFIG["sizes"]))
    bench.add_argument("--sweeps", type=int, default=BENCHMARK_CONFIG["sweeps"])
    bench.add_argument("--clusters", type=int, default=BENCHMARK_CONFIG["clusters"])
    bench.add_argument("--anchors", type=int, default=BENCHMARK_CONFIG["anchors"])
    bench.add_argument("--depth", type=int, default=BENCHMARK_CONFIG["depth"])

    sweep = sub.add_parser("sweep-depth", parents=[common, data, model], help="ACC/NMI/purity by depth")
    sweep.add_argument("--depths", type=_int_list, default=[1, 2, 3])

    ev = sub.add_parser("eval", parents=[common], help="metrics from stored assignments and labels")
    ev.add_argument("--assignments", type=Path, required=True, help="assignments CSV or result JSON")
    ev.add_argument("--labels", type=Path, required=True, help="labels CSV or dataset directory")
    ev.add_argument("--nmi-average", default=METRICS_CONFIG["nmi_average_default"],
                    choices=METRICS_CONFIG["nmi_average_methods"])

    sub.add_parser("gen", parents=[common, data, synth], help="write a synthetic dataset")
    return parser

def synthetic_from_args(args: argparse.Namespace, required: bool,
                        defaults: Optional[dict] = None) -> Optional[SyntheticSpec]:
    """--synthetic と個別フラグから合成データ仕様を組み立て（defaults は不足キーの補完）"""
    spec = parse_synthetic_spec(args.synthetic) if getattr(args, "synthetic", None) else None
    overrides = {
        "n": getattr(args, "n", None),
        "k_true": getattr(args, "k_true", None),
        "dims": getattr(args, "dims", None),
        "separation": getattr(args, "separation", None),
        "noise_sigma": getattr(args, "noise", None),
        "seed": getattr(args, "seed", None),
    }
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if spec is None and not overrides:
        if required:
            raise ValidationError("a synthetic spec is required (--synthetic or --n/--k-true/--dims)")
        return None

    data = dict(defaults or {})
    if spec is not None:
        data.update(spec.to_dict())
    data.update(overrides)
    if "dims" in overrides:
        data["p"] = len(overrides["dims"])
    return SyntheticSpec.from_dict(data)

def run_config_from_args(args: argparse.Namespace, threads: int) -> RunConfig:
    """fit / sweep-depth の引数から RunConfig を作成"""
    return RunConfig(
        data_dir=args.data,
        synthetic=parse_synthetic_spec(args.synthetic) if args.synthetic else None,
        clusters=args.clusters,
        anchors=args.anchors,
        depth=args.depth,
        normalization=args.norm.replace("-", "_"),
        max_iter=args.max_iter,
        rel_tol=args.tol,
        seed=args.seed,
        restarts=args.restarts,
        threads=threads,
        degree_norm=not args.no_degree_norm,
        nmi_average=args.nmi_average,
        debug_trace=args.debug_trace,
        init_state=getattr(args, "init_state", None),
        out=args.out,
    )

def render_metrics(metrics: Optional[dict], lang: str):
    """評価指標の表示"""
    if metrics is None:
        print(get_text("metrics_absent", lang))
        return
    print(f"{get_text('metrics', lang)}: "
          f"{get_text('acc', lang)}={metrics['acc']:.4f} "
          f"{get_text('nmi', lang)}={metrics['nmi']:.4f} "
          f"{get_text('purity', lang)}={metrics['purity']:.4f}")

def render_fit_summary(payload: dict, lang: str):
    """fit 結果の表示"""
    dataset = payload["dataset"]
    fit = payload["fit"]
    print(f"{get_text('views', lang)}: {dataset['p']}  "
          f"{get_text('samples', lang)}: {dataset['n']}  "
          f"{get_text('dims', lang)}: {dataset['dims']}")
    status = get_text("converged", lang) if fit["converged"] else get_text("not_converged", lang)
    print(f"{get_text('fit_finished', lang)}: {get_text('iterations', lang)}={fit['iterations']} ({status}), "
          f"{get_text('objective', lang)}={fit['objective_trace'][-1]:.6g}")

def render_table(df, title: str, out: Optional[Path], lang: str):
    """表を CSV として出力（--out があればファイル、なければ標準出力）"""
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        write_table(df, out)
        print(f"{get_text('table_written', lang)}: {out}")
    else:
        print(f"# {title}")
        sys.stdout.write(write_table(df))

def dispatch(args: argparse.Namespace, lang: str) -> int:
    """サブコマンドを実行"""
    threads = args.threads if args.threads is not None else get_thread_limit()

    if args.command == "fit":
        cfg = run_config_from_args(args, threads)
        code, payload = cmd_fit(cfg)
        render_fit_summary(payload, lang)
        render_metrics(payload["metrics"], lang)
        if cfg.out is not None:
            print(f"{get_text('result_written', lang)}: {cfg.out}")
        return code

    if args.command == "benchmark":
        if args.data is not None:
            raise ValidationError("benchmark generates its own data; use --synthetic or --n/--dims")
        base = synthetic_from_args(args, required=False, defaults={
            "n": args.sizes[0] if args.sizes else 2,
            "k_true": args.clusters,
            "dims": list(BENCHMARK_CONFIG["dims"]),
            "separation": BENCHMARK_CONFIG["separation"],
            "noise_sigma": BENCHMARK_CONFIG["noise_sigma"],
        })
        table = cmd_benchmark(args.sizes, base, sweeps=args.sweeps, clusters=args.clusters,
                              anchors=args.anchors, depth=args.depth, threads=threads)
        render_table(table, get_text("benchmark_title", lang), args.out, lang)
        return EXIT_CODES["success"]

    if args.command == "sweep-depth":
        cfg = run_config_from_args(args, threads)
        table = cmd_sweep_depth(cfg, args.depths)
        render_table(table, get_text("sweep_title", lang), args.out, lang)
        return EXIT_CODES["success"]

    if args.command == "eval":
        metrics = cmd_eval(args.assignments, args.labels, args.nmi_average)
        render_metrics(metrics.to_dict(), lang)
        return EXIT_CODES["success"]

    if args.command == "gen":
        if args.out is None:
            raise ValidationError("gen needs --out <directory>")
        spec = synthetic_from_args(args, required=True)
        ds = cmd_gen(spec, args.out)
        print(f"{get_text('dataset_written', lang)}: {args.out} "
              f"({get_text('views', lang)}={ds.p}, {get_text('samples', lang)}={ds.n})")
        sys.stdout.write(write_table(dataset_summary(ds, lang)))
        return EXIT_CODES["success"]

    raise ValidationError(f"unknown command '{args.command}'")

def main(argv: Optional[List[str]] = None) -> int:
    """メインアプリケーション"""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    lang = args.lang or get_current_language()

    try:
        # BLAS は常に1スレッド、並列はビュー単位のみ
        with threadpool_limits(limits=1):
            return dispatch(args, lang)
    except ValidationError as exc:
        print(f"{get_text('error_validation', lang)}: {exc}", file=sys.stderr)
        return EXIT_CODES["validation"]
    except MVSCError as exc:
        print(f"{get_text('error_runtime', lang)}: {exc}", file=sys.stderr)
        return EXIT_CODES["runtime"]
    except Exception as exc:  # noqa: BLE001
        logger.exception("unexpected failure")
        print(f"{get_text('error_unexpected', lang)}: {exc}", file=sys.stderr)
        return EXIT_CODES["unexpected"]

if __name__ == "__main__":
    sys.exit(main())

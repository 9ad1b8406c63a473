import argparse
import json
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from app.classifiers.metrics import evaluate
from app.classifiers.persistence import save_model
from app.classifiers.training import train_model
from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, WhiskerBenchError
from app.core.logger import setup_logging
from app.core.seeds import derive_seed
from app.dataset.assembly import assemble_dataset, standardize
from app.dataset.storage import read_dataset, write_dataset
from app.harness.config import load_study_config
from app.harness.grid import run_hardness_grid, run_roughness_grid
from app.harness.simulation import dab_recordings, sweep_recordings
from app.harness.studies import run_downsampling_study, run_window_tradeoff
from app.harness.tables import emit_constraint_table, write_confusion_csv
from app.schemas.classifiers import ModelFamily
from app.schemas.dataset import ChannelSelector
from app.schemas.harness import GridSpec, StudyReport
from app.schemas.sensor import StageConfig
from app.schemas.surface import HardnessSpec, SurfaceSpec
from app.sensor.dab import simulate_dab
from app.sensor.fusion import fuse_to_stream
from app.sensor.io import write_laser_csv, write_recording_csv
from app.sensor.sweep import simulate_sweep
from app.surface.catalog import find_specimen
from app.surface.export import write_catalog_manifest, write_profile_csv
from app.surface.generator import build_roughness_profile

# Код выхода при ошибке предметной области или конфигурации
EXIT_FAILURE = 2


def _grid(args) -> GridSpec:
    grid = load_study_config(args.config) if args.config else GridSpec()
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if getattr(args, "runs", None) is not None:
        updates["n_runs"] = args.runs
    return grid.model_copy(update=updates) if updates else grid


def _seed(args) -> int:
    return settings.STUDY_SEED if args.seed is None else args.seed


def _specimen(class_id: str, kind: type):
    spec = find_specimen(class_id)
    if not isinstance(spec, kind):
        raise InvalidArgumentError(f"{class_id} не подходит для этой команды")
    return spec


def _summarize(report: StudyReport) -> None:
    for check in report.checks:
        status = "OK" if check.passed else "FAIL"
        logger.info(f"[{status}] {check.name} {check.scope}: {check.detail}")
    for path in report.emitted_files:
        logger.info(f"Записан файл {path}")


def cmd_constraint(args) -> None:
    path = Path(args.out) if args.out else args.out_dir / "constraint_table.csv"
    emit_constraint_table(path)


def cmd_sweep(args) -> None:
    spec = _specimen(args.class_id, SurfaceSpec)
    stage = StageConfig(speed=args.speed, sweep_length=args.length)
    profile = build_roughness_profile(spec, max(args.length * 1000.0 + 2.0, 10 * spec.spatial_period + 1.0), 1.0)
    recording = simulate_sweep(profile, stage, seed=derive_seed(_seed(args), "sweep", f"{args.speed:g}", 0, spec.class_id, 0))

    path = Path(args.out) if args.out else args.out_dir / f"sweep_{spec.class_id}_V{args.speed:g}.csv"
    write_recording_csv(fuse_to_stream(recording), path)
    write_laser_csv(recording, path.with_name(f"{path.stem}_laser{path.suffix}"))
    write_profile_csv(profile, path.with_name(f"{path.stem}_profile{path.suffix}"))


def cmd_catalog(args) -> None:
    write_catalog_manifest(Path(args.out) if args.out else args.out_dir / "catalog.txt")


def cmd_dab(args) -> None:
    material = _specimen(args.class_id, HardnessSpec)
    recording = simulate_dab(material, args.t_dab, seed=derive_seed(_seed(args), "dab", 0, material.class_id, 0))
    logger.info(f"{material.name}: t_r={recording.rise_time_measured:.2f} мс, t_f={recording.fall_time_measured:.2f} мс")

    path = Path(args.out) if args.out else args.out_dir / f"dab_{material.class_id}.csv"
    write_recording_csv(fuse_to_stream(recording), path)


def cmd_dataset(args) -> None:
    grid = _grid(args)
    if args.kind == "hardness":
        recordings = dab_recordings(grid, run=0)
    else:
        recordings = sweep_recordings(grid, args.speed, run=0)

    dataset = assemble_dataset(recordings, ChannelSelector(args.selector), args.window, derive_seed(grid.seed, "split", 0), grid.stream_rate)
    path = Path(args.out) if args.out else args.out_dir / f"{args.kind}_{args.selector}_W{args.window}.csv"
    write_dataset(dataset, path)


def cmd_train(args) -> None:
    grid = _grid(args)
    dataset = standardize(read_dataset(args.dataset))
    config = grid.model_settings(ModelFamily(args.model)).model_copy(update={"seed": derive_seed(grid.seed, "model", 0)})

    model = train_model(dataset, config)
    result = evaluate(model, dataset, "test")
    logger.info(f"{args.model}: точность на test {result.accuracy_mean:.2f}%, {result.inference_time_per_window:.1f} мкс/окно")

    stem = Path(args.dataset).stem
    out = Path(args.out) if args.out else args.out_dir / f"{stem}_{args.model}.npz"
    save_model(model, out)
    write_confusion_csv(result, out.with_name(f"{out.stem}_confusion.csv"))
    out.with_name(f"{out.stem}_result.json").write_text(json.dumps(result.model_dump(mode="json"), indent=2), encoding="utf-8")


def cmd_grid_roughness(args) -> None:
    _summarize(run_roughness_grid(_grid(args), args.out_dir, args.parallelism))


def cmd_grid_hardness(args) -> None:
    _summarize(run_hardness_grid(_grid(args), args.out_dir, args.parallelism))


def cmd_study_downsample(args) -> None:
    _summarize(run_downsampling_study(_grid(args), out_dir=args.out_dir, parallelism=args.parallelism))


def cmd_study_window(args) -> None:
    _summarize(run_window_tradeoff(_grid(args), kind=args.kind, out_dir=args.out_dir, parallelism=args.parallelism))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="зерно исследования (по умолчанию STUDY_SEED)")
    common.add_argument("--out-dir", type=Path, default=settings.OUTPUT_DIR, help="каталог результатов")
    common.add_argument("--parallelism", type=int, default=settings.PARALLELISM, help="число параллельных заданий")
    common.add_argument("--config", type=Path, default=None, help="TOML-файл исследования")
    common.add_argument("--log-level", default=None, help="уровень логирования")

    parser = argparse.ArgumentParser(prog="whiskerbench", description="Симуляция вибриссного датчика и классификация текстур")
    commands = parser.add_subparsers(dest="command", required=True)

    constraint = commands.add_parser("constraint", parents=[common], help="таблица ограничения D < d_sep / 2")
    constraint.add_argument("--out", default=None)
    constraint.set_defaults(handler=cmd_constraint)

    catalog = commands.add_parser("catalog", parents=[common], help="манифест каталога образцов")
    catalog.add_argument("--out", default=None)
    catalog.set_defaults(handler=cmd_catalog)

    sweep = commands.add_parser("sweep", parents=[common], help="один проход по образцу шероховатости")
    sweep.add_argument("--class", dest="class_id", required=True, help="H1..T6")
    sweep.add_argument("--speed", type=float, default=50.0, help="V_s, мм/мин")
    sweep.add_argument("--length", type=float, default=settings.SWEEP_LENGTH_MM, help="длина прохода, мм")
    sweep.add_argument("--out", default=None)
    sweep.set_defaults(handler=cmd_sweep)

    dab = commands.add_parser("dab", parents=[common], help="одно касание материала")
    dab.add_argument("--class", dest="class_id", required=True, help="hard1..hard6")
    dab.add_argument("--t-dab", type=float, default=settings.DAB_DURATION_MS, help="длительность касания, мс")
    dab.add_argument("--out", default=None)
    dab.set_defaults(handler=cmd_dab)

    dataset = commands.add_parser("dataset", parents=[common], help="датасет окон одного прогона")
    dataset.add_argument("--kind", choices=("roughness", "hardness"), default="roughness")
    dataset.add_argument("--selector", choices=[s.value for s in ChannelSelector], default="PA")
    dataset.add_argument("--window", type=int, default=50)
    dataset.add_argument("--speed", type=float, default=50.0)
    dataset.add_argument("--out", default=None)
    dataset.set_defaults(handler=cmd_dataset)

    train = commands.add_parser("train", parents=[common], help="обучение и оценка модели на файле датасета")
    train.add_argument("--dataset", type=Path, required=True)
    train.add_argument("--model", choices=[m.value for m in ModelFamily], default="SVM")
    train.add_argument("--out", default=None)
    train.set_defaults(handler=cmd_train)

    for name, handler, help_text in (
        ("grid-roughness", cmd_grid_roughness, "сетка классификации шероховатости"),
        ("grid-hardness", cmd_grid_hardness, "сетка классификации твердости"),
        ("study-downsample", cmd_study_downsample, "точность в зависимости от частоты потока"),
        ("study-window", cmd_study_window, "точность и время инференса в зависимости от W"),
    ):
        study = commands.add_parser(name, parents=[common], help=help_text)
        study.add_argument("--runs", type=int, default=None, help="число прогонов")
        if name == "study-window":
            study.add_argument("--kind", choices=("roughness", "hardness"), default="roughness", help="проходы или касания")
        study.set_defaults(handler=handler)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        args.handler(args)
    except (WhiskerBenchError, ValidationError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_FAILURE

    return 0


if __name__ == "__main__":
    raise SystemExit(main())

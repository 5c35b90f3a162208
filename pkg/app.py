from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path

import click
from dotenv import load_dotenv

from extensions import init_logging, suites
from models import CheckReport, Scenario, Tolerances

log = logging.getLogger("kosmann")

ALL = "all"
DEFAULT_POINTS = 32
DEFAULT_SEED = 0
BUNDLED_SCENARIOS = Path(__file__).resolve().parent / "scenarios"


class UnknownSuiteError(LookupError):
    pass


@dataclass(frozen=True)
class Settings:
    """Environment-level defaults; scenario files and flags take precedence."""

    tolerances: Tolerances
    points: int
    seed: int
    scenario_dir: Path
    log_level: str

    @classmethod
    def from_env(cls) -> "Settings":
        defaults = Tolerances()
        return cls(
            tolerances=Tolerances(
                _env_number("KOSMANN_TOL_IDENTITY", float, defaults.identity),
                _env_number("KOSMANN_TOL_ORACLE", float, defaults.oracle),
            ),
            points=_env_number("KOSMANN_POINTS", int, DEFAULT_POINTS),
            seed=_env_number("KOSMANN_SEED", int, DEFAULT_SEED),
            scenario_dir=Path(os.environ.get("KOSMANN_SCENARIO_DIR", BUNDLED_SCENARIOS)),
            log_level=os.environ.get("KOSMANN_LOG_LEVEL", "WARNING"),
        )


def _env_number(name: str, kind, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = kind(raw)
    except ValueError:
        raise RuntimeError(f"{name} must be a {kind.__name__}, got {raw!r}")
    if value < 0:
        raise RuntimeError(f"{name} must not be negative")
    return value


@dataclass
class App:
    settings: Settings
    cli: click.Command | None = None

    def load(self, scenario: str) -> Scenario:
        from forms import load_scenario  # noqa: WPS433

        return load_scenario(
            resolve_scenario(scenario, self.settings.scenario_dir),
            default_count=self.settings.points,
            default_seed=self.settings.seed,
            default_tolerances=self.settings.tolerances,
        )


def create_app() -> App:
    """
    Application factory: reads `.env` and the environment, configures
    logging, registers the check suites and builds the command.
    """
    load_dotenv()
    settings = Settings.from_env()
    init_logging(settings.log_level)

    register_suites()

    app = App(settings)
    register_cli(app)
    return app


def register_suites() -> None:
    from checks.commutator import commutator_suite  # noqa: WPS433
    from checks.kosmann import kosmann_suite  # noqa: WPS433
    from checks.lie_derivative import lie_suite  # noqa: WPS433
    from checks.oracle import oracle_suite  # noqa: WPS433
    from checks.spinors import spin_suite  # noqa: WPS433
    from checks.theorem81 import theorem81_suite  # noqa: WPS433
    from checks.validate import validate_suite  # noqa: WPS433

    for suite in (validate_suite, lie_suite, kosmann_suite, spin_suite, theorem81_suite, commutator_suite, oracle_suite):
        suites.register(suite)


def resolve_scenario(scenario: str, scenario_dir: Path) -> Path:
    """A path to a scenario file, or the name of a bundled one."""
    candidate = Path(scenario)
    if candidate.is_file():
        return candidate
    for name in (scenario, f"{scenario}.json"):
        bundled = scenario_dir / name
        if bundled.is_file():
            return bundled
    raise FileNotFoundError(f"no scenario file or bundled scenario named {scenario!r}")


def run_checks(
    scenario: Scenario,
    suite: str,
    variant: str,
    *,
    points: int | None = None,
    seed: int | None = None,
    tolerances: Tolerances | None = None,
) -> CheckReport:
    """Run one suite, or all of them in registration order, over the scenario."""
    from checks.utils import get_context  # noqa: WPS433

    if not len(suites):
        register_suites()
    if suite != ALL and suite not in suites:
        raise UnknownSuiteError(f"unknown suite {suite!r}; expected one of {', '.join(suites.names())} or {ALL}")

    plan = scenario.plan
    if plan.is_explicit and (points is not None or seed is not None):
        log.warning("scenario %s lists its points; --points/--seed ignored", scenario.name)
    plan = plan.with_overrides(points, seed)
    tolerances = tolerances or scenario.tolerances or Tolerances()

    ctx = get_context(scenario, variant, tolerances, plan)
    selected = list(suites) if suite == ALL else [suites.get(suite)]
    report = CheckReport(
        scenario.name, suite, variant, None if plan.is_explicit else plan.seed, len(ctx.points)
    )
    for current in selected:
        if suite == ALL and not current.supports(variant):
            log.warning("suite %s skipped: it needs variant %s", current.name, "/".join(current.variants))
            continue
        log.debug("running suite %s on %s", current.name, scenario.name)
        report.results.extend(current.run(ctx))
    return report


def register_cli(app: App) -> None:
    from expr import ExprError  # noqa: WPS433
    from forms import ScenarioError  # noqa: WPS433
    from geometry import GeometryError  # noqa: WPS433
    from lie import KOSMANN, VARIANTS, LieError  # noqa: WPS433
    from spin import SpinError, VariantMismatchError  # noqa: WPS433

    @click.command("kosmann")
    @click.argument("suite", type=click.Choice([*suites.names(), ALL]))
    @click.option("--scenario", required=True, help="Scenario file, or the name of a bundled scenario.")
    @click.option("--variant", type=click.Choice(VARIANTS), default=KOSMANN, show_default=True)
    @click.option("--points", type=click.IntRange(min=1), help="Number of sample points drawn from the box.")
    @click.option("--seed", type=click.IntRange(min=0), help="Seed of the sample points.")
    @click.option("--tol-identity", type=click.FloatRange(min=0), help="Tolerance of the identity checks.")
    @click.option("--tol-oracle", type=click.FloatRange(min=0), help="Tolerance of the flow oracle.")
    @click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
    @click.pass_context
    def kosmann(ctx, suite, scenario, variant, points, seed, tol_identity, tol_oracle, as_json):
        """Run a check suite over a scenario and print one line per check."""
        try:
            loaded = app.load(scenario)
        except FileNotFoundError as exc:
            raise click.BadParameter(str(exc), param_hint="--scenario")
        except ScenarioError as exc:
            raise click.ClickException(f"cannot load scenario: {exc}")

        tolerances = loaded.tolerances or app.settings.tolerances
        if tol_identity is not None:
            tolerances = replace(tolerances, identity=tol_identity)
        if tol_oracle is not None:
            tolerances = replace(tolerances, oracle=tol_oracle)

        try:
            report = run_checks(loaded, suite, variant, points=points, seed=seed, tolerances=tolerances)
        except VariantMismatchError as exc:
            raise click.UsageError(str(exc))
        except (ExprError, GeometryError, LieError, SpinError) as exc:
            raise click.ClickException(str(exc))

        click.echo(report.render_json() if as_json else report.render_text(), nl=False)
        if not report.passed:
            ctx.exit(1)

    app.cli = kosmann


app = create_app()

if __name__ == "__main__":
    app.cli()

"""Helper methods for the `sacred` experimental configuration and logging framework."""

import dataclasses
import json
import os
import pathlib
import warnings
from typing import Any, Dict, Mapping, Optional, Sequence

import sacred
import sacred.observers
import sacred.run

import advreg
from advreg.data import types
from advreg.util import util

RUN_ROOT_ENV = "ADVREG_RUN_ROOT"
DEFAULT_RUN_ROOT = "runs"
MANIFEST_NAME = "manifest.json"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_DIVERGED = 3


def default_run_root() -> pathlib.Path:
    """`$ADVREG_RUN_ROOT` if set and non-empty, else ``./runs``."""
    return util.parse_path(os.environ.get(RUN_ROOT_ENV) or DEFAULT_RUN_ROOT)


def build_sacred_symlink(
    run_dir: types.AnyPath,
    run: sacred.run.Run,
    link_name: str = "sacred",
) -> None:
    """Points ``{run_dir}/{link_name}`` at the directory of the run's file observer."""
    run_dir = util.parse_path(run_dir)
    sacred_dir = get_sacred_dir_from_run(run)
    if sacred_dir is None:
        warnings.warn(RuntimeWarning("Couldn't find sacred directory."))
        return
    symlink_path = run_dir / link_name
    # Relative, so run directories can be moved as a whole.
    target_path = pathlib.Path(os.path.relpath(sacred_dir, start=run_dir))
    if symlink_path.is_symlink():
        symlink_path.unlink()
    try:
        symlink_path.symlink_to(target_path, target_is_directory=True)
    except OSError as e:
        warnings.warn(RuntimeWarning(f"Couldn't link sacred directory: {e}"))


def get_sacred_dir_from_run(run: sacred.run.Run) -> Optional[pathlib.Path]:
    """Returns path to the sacred directory, or None if not found."""
    for obs in run.observers:
        if isinstance(obs, sacred.observers.FileStorageObserver):
            if obs.dir is None:
                return None
            return util.parse_path(obs.dir)
    return None


@dataclasses.dataclass
class RunManifest:
    """What a command read, wrote and decided, stored as ``manifest.json``."""

    command: str
    config: Dict[str, Any]
    """Resolved configuration, every key included."""

    seed: int
    config_digest: str = ""
    artifacts: Dict[str, str] = dataclasses.field(default_factory=dict)
    """Artifact paths relative to the run directory."""

    status: str = "completed"
    run_id: str = ""
    """Label written into metric tables; empty for commands without one."""

    extra: Dict[str, Any] = dataclasses.field(default_factory=dict)
    version: str = advreg.__version__

    def save(self, run_dir: types.AnyPath) -> pathlib.Path:
        path = util.parse_path(run_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)
        path.write_text(text + "\n")
        return path

    @classmethod
    def load(cls, run_dir: types.AnyPath) -> "RunManifest":
        """Reads ``manifest.json`` from `run_dir`.

        Raises:
            FileNotFoundError: `run_dir` has no manifest.
        """
        path = util.parse_path(run_dir) / MANIFEST_NAME
        if not path.is_file():
            raise FileNotFoundError(f"No {MANIFEST_NAME} in {path.parent}.")
        return cls(**json.loads(path.read_text()))


def plain(value: Any) -> Any:
    """Converts sacred's read-only containers to JSON-friendly builtins."""
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def run_console(
    ex: sacred.Experiment,
    command: str,
    argv: Optional[Sequence[str]] = None,
) -> int:
    """Runs `ex` from the command line and maps the outcome to an exit code.

    A ``FileStorageObserver`` writing to ``<run_root>/sacred/<command>``
    replaces any file observer already attached.

    Args:
        ex: The experiment.
        command: Console command name, used for the observer directory.
        argv: Command-line arguments including the program name; defaults to
            `sys.argv`.

    Returns:
        0 on success, 1 for usage or configuration errors, 2 if the run raised,
        and 3 if the run finished with status ``diverged``.
    """
    observer_path = default_run_root() / "sacred" / command
    previous = list(ex.observers)
    ex.observers[:] = [
        o for o in previous if not isinstance(o, sacred.observers.FileStorageObserver)
    ]
    ex.observers.append(sacred.observers.FileStorageObserver(observer_path))
    ex.current_run = None
    try:
        run = ex.run_commandline(None if argv is None else list(argv))
    except SystemExit as e:
        if ex.current_run is not None and ex.current_run.status != "COMPLETED":
            return EXIT_RUNTIME
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    finally:
        ex.observers[:] = previous
    result = getattr(run, "result", None)
    if isinstance(result, Mapping) and result.get("status") == "diverged":
        return EXIT_DIVERGED
    return EXIT_OK

"""
Description:
    File helpers shared by the command line and the experiment harness:
    YAML configs with an optional base config, JSONL records, tab-separated
    tables and key=value summaries.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from omegaconf import DictConfig, OmegaConf

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def load_config(config_path: PathLike) -> DictConfig:
    """Loads a configuration file and optionally merges it over a base configuration.

    Args:
    config_path (Path): Path to the configuration file. A relative
        `base_config` is resolved against the file's directory.
    """
    config_path = Path(config_path)
    config = OmegaConf.load(config_path)

    if config.get("base_config", None) is not None:
        base_path = Path(config["base_config"])
        if not base_path.is_absolute():
            base_path = config_path.parent / base_path
        base_config = load_config(base_path)
        config = OmegaConf.merge(base_config, config)

    return config


def write_jsonl(records: Iterable[dict], file_path: PathLike) -> None:
    """Writes one JSON object per line."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    logger.debug(f"jsonl saved to {file_path}")


def read_jsonl(file_path: PathLike) -> List[dict]:
    with open(file_path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f.read().splitlines() if line.strip()]


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value).replace("\t", " ").replace("\n", " ")


def format_table(headers: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = ["\t".join(headers)]
    lines += ["\t".join(_format(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def save_table(headers: Sequence[str], rows: Iterable[Sequence[Any]], filename: PathLike) -> None:
    """Save rows as a tab-separated table with a header line."""
    filename = Path(filename)
    filename.parent.mkdir(parents=True, exist_ok=True)
    filename.write_text(format_table(headers, rows), encoding="utf-8")


def read_table(filename: PathLike) -> Tuple[List[Dict[str, str]], List[str]]:
    """Read a table written by save_table; returns (rows as dicts, headers)."""
    lines = [line for line in Path(filename).read_text(encoding="utf-8").splitlines() if line.strip()]
    if not lines:
        return [], []
    headers = lines[0].split("\t")
    return [dict(zip(headers, line.split("\t"))) for line in lines[1:]], headers


def format_summary(summary: Mapping[str, Any]) -> str:
    """One key=value pair per line, in insertion order."""
    return "".join(f"{key}={_format(value)}\n" for key, value in summary.items())


def save_summary(summary: Mapping[str, Any], filename: PathLike) -> None:
    filename = Path(filename)
    filename.parent.mkdir(parents=True, exist_ok=True)
    filename.write_text(format_summary(summary), encoding="utf-8")


def read_summary(filename: PathLike) -> Dict[str, str]:
    out = {}
    for line in Path(filename).read_text(encoding="utf-8").splitlines():
        key, sep, value = line.partition("=")
        if sep:
            out[key.strip()] = value.strip()
    return out

"""
Comandos bash para comprobar que el entrenamiento es reproducible (ejecutar desde el repo)

uv run python scripts/smoke_train_output.py

Lanza dos veces la misma ejecución corta en tabular y compara los hashes de metrics.csv,
diagnostics.csv y del bloque de resumen (sin las líneas con rutas).
"""

from __future__ import annotations
import hashlib
import subprocess
import sys
import tempfile
from pathlib import Path

BEGIN = "===RUN_SUMMARY_BEGIN==="
END = "===RUN_SUMMARY_END==="

TRAIN_ARGS = [
    "--env", "tabular:7", "--epochs", "5", "--collect_steps", "200", "--batch_steps", "400",
    "--replay_steps", "2000", "--hidden_width", "16", "--max_episode_steps", "50", "--checkpoint_every", "5",
]

def h16(s: str) -> str:
    return hashlib.sha256(s.encode("utf-8")).hexdigest()[:16]

def extract_block(stdout: str) -> str:
    s = stdout.replace("\r\n", "\n")
    if BEGIN not in s or END not in s:
        raise RuntimeError("Run summary markers not found in stdout")
    block = s.split(BEGIN, 1)[1].split(END, 1)[0]
    lines = [ln for ln in block.strip("\n").splitlines() if not ln.startswith(("Run ", "checkpoint:"))]
    return "\n".join(lines).strip()

def run_once(out_dir: Path) -> dict[str, str] | int:
    cmd = [sys.executable, "main.py", "--log-level", "WARNING", "train", *TRAIN_ARGS, "--out_dir", str(out_dir)]
    p = subprocess.run(cmd, capture_output=True, text=True)
    if p.returncode != 0:
        print("exit:", p.returncode)
        print("stderr_head:\n", "\n".join((p.stderr or "").splitlines()[:40]))
        return p.returncode
    return {
        "summary": h16(extract_block(p.stdout or "")),
        "metrics": h16((out_dir / "metrics.csv").read_text(encoding="utf-8")),
        "diagnostics": h16((out_dir / "diagnostics.csv").read_text(encoding="utf-8")),
    }

def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        a = run_once(Path(tmp) / "a")
        if isinstance(a, int):
            return a
        b = run_once(Path(tmp) / "b")
        if isinstance(b, int):
            return b

    for key in a:
        print(f"{key}_hash:", a[key], "OK" if a[key] == b[key] else f"DIFF ({b[key]})")
    return 0 if a == b else 1

if __name__ == "__main__":
    raise SystemExit(main())

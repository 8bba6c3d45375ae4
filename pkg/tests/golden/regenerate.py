"""Rewrite the golden run trees: python3 tests/golden/regenerate.py"""
import shutil
from pathlib import Path

from rftopo import pipeline

HERE = Path(__file__).parent
NAMES = ("tiny_symmetric_dumbbell", "tiny_dimpled_sphere")

if __name__ == "__main__":
    for name in NAMES:
        dest = HERE / name
        shutil.rmtree(dest, ignore_errors=True)
        pipeline.run(pipeline.load_config(name), dest)
        (dest / "manifest.json").unlink()
        print("wrote", dest)

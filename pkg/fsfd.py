#!/usr/bin/env python3
"""
CLI de detección de fallas basada en representaciones de muestra finita.

Uso:
    python fsfd.py simulate --config experimento.json
    python fsfd.py train --config experimento.json
    python fsfd.py detect --config experimento.json
    python fsfd.py verify
    python fsfd.py bench --out resultados/
"""

from src.cli.main import run

if __name__ == "__main__":
    run()

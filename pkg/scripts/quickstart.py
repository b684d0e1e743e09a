#!/usr/bin/env python3
"""
Quick start for telapa-lab.
Creates the output directory, an example .env, and runs the smoke curriculum
for TeLAPA and Scratch on one seed.
"""

import os
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

ENV_TEMPLATE = """# telapa-lab runtime settings
TELAPA_THREADS=2
TELAPA_OUTPUT_DIR=runs
TELAPA_LOG_LEVEL=INFO
"""


class ProjectSetup:
    """
    Prepares a checkout and runs a first smoke suite.
    """

    def __init__(self):
        self.project_root = Path(__file__).parent.parent
        self.runs_dir = self.project_root / 'runs'

    def check_virtual_environment(self) -> bool:
        return hasattr(sys, 'real_prefix') or (
            hasattr(sys, 'base_prefix') and sys.base_prefix != sys.prefix
        )

    def create_directories(self):
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        print(f"✅ Output directory: {self.runs_dir}")

    def setup_environment(self):
        env_file = self.project_root / '.env'
        if not env_file.exists():
            env_file.write_text(ENV_TEMPLATE, encoding='utf-8')
            print("✅ Environment file created")

    def run_smoke(self) -> int:
        from src.interface.cli import main

        return main([
            'suite',
            '--config', str(self.project_root / 'configs' / 'smoke.json'),
            '--methods', 'scratch,telapa',
            '--seeds', '0',
            '--out', str(self.runs_dir / 'smoke'),
        ])

    def run_setup(self) -> int:
        print("🚀 TELAPA-LAB - QUICK START")
        print("=" * 50)

        if not self.check_virtual_environment():
            print("⚠️  Warning: Not running in a virtual environment!")

        print("\n📁 Preparing directories...")
        self.create_directories()
        self.setup_environment()

        print("\n🧪 Running the smoke curriculum (A, B, A' on small maps)...")
        code = self.run_smoke()

        print("\n" + "=" * 50)
        if code == 0:
            print("✨ Smoke suite complete!")
            print(f"\nReport: {self.runs_dir / 'smoke' / 'report' / 'summary.txt'}")
        else:
            print("⚠️  Smoke suite finished with failures")
        print("\nFull desk-scale run:")
        print("  python scripts/run_telapa.py run --config configs/desk.json --seed 0")
        return code


if __name__ == "__main__":
    try:
        sys.exit(ProjectSetup().run_setup())
    except KeyboardInterrupt:
        print("\n\nSetup interrupted.")
        sys.exit(130)
    except Exception as e:
        print(f"Error: {e}")
        sys.exit(1)

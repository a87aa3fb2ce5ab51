#!/usr/bin/env python3
"""
Setup script for the near-field beam-training simulator.
"""

import subprocess
import sys
from pathlib import Path


def run_command(command, description):
    """Run a command and handle errors."""
    print(f"\n{'='*50}")
    print(f"Running: {description}")
    print(f"Command: {command}")
    print('='*50)

    try:
        result = subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print("✅ Success!")
        if result.stdout:
            print(f"Output: {result.stdout}")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ Error: {e}")
        if e.stderr:
            print(f"Error output: {e.stderr}")
        return False


def main():
    """Run the complete setup."""
    print("🚀 Setting up the near-field beam-training simulator")

    if sys.version_info < (3, 9):
        print("❌ Error: Python 3.9+ is required")
        sys.exit(1)

    print(f"✅ Python version: {sys.version}")

    if not run_command(f"{sys.executable} -m pip install -r requirements.txt", "Installing dependencies"):
        print("❌ Failed to install dependencies")
        sys.exit(1)

    for directory in ["output", "storage/codebooks", "logs"]:
        Path(directory).mkdir(parents=True, exist_ok=True)
        print(f"✅ Created directory: {directory}")

    print("\n🧪 Testing setup...")
    try:
        import numpy as np

        from models.schemas import ArrayConfig, Scheme, UserLocation
        from tools.array_model import synthesize_channel
        from workflows.training_schemes import BeamTrainer

        cfg = ArrayConfig()
        trainer = BeamTrainer(cfg, tx_power=1.0)
        theta = float(trainer.dft_codebook.angles[128])
        r = float(trainer.r_grid[100])
        channel = synthesize_channel(
            cfg, UserLocation(spatial_angle=theta, range=r),
            rician_db=300.0, ref_gain_db=-62.0, n_nlos=0, rng=np.random.default_rng(0),
        )
        report = trainer.run_prmse(channel, 0.0, np.random.default_rng(0))
        print("✅ Noiseless estimate completed")
        print(f"📊 {Scheme.PRMSE_JE.value}: theta_hat={report.theta_hat:.6f} (true {theta:.6f}), "
              f"r_hat={report.r_hat:.3f} m (true {r:.3f} m)")

    except Exception as e:
        print(f"❌ Error testing setup: {e}")
        sys.exit(1)

    print("\n" + "="*50)
    print("🎉 Setup completed successfully!")
    print("="*50)
    print("\n📋 Next steps:")
    print("1. Beam patterns and width curves:")
    print("   python cli.py pattern --config config/pattern.json")
    print("\n2. One estimate:")
    print("   python cli.py estimate --config config/estimate.json")
    print("\n3. Monte Carlo sweep:")
    print("   python cli.py mc --config config/nmse_vs_snr.json --threads 4")
    print("\n4. Run the tests:")
    print("   python tests/run_tests.py")
    print("\n🔧 Environment variables (optional):")
    print("   NFBT_SEED=1234")
    print("   NFBT_CODEBOOK_CACHE_DIR=storage/codebooks")


if __name__ == "__main__":
    main()

import argparse
import logging
import sys
import time

from config import DEFAULT_CONFIG_PATH, DUTY_STRATEGIES, RANKINGS, SETTING_CHOICES, ConfigError, parse_config
from experiment import run_experiment

logger = logging.getLogger(__name__)


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description='Agent-based simulation of two peer-review systems')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='Run an experiment and write its output bundle')

    # Main args
    run.add_argument('--config', type=str, default=str(DEFAULT_CONFIG_PATH), help='JSON config file (Default python/config.json)')
    run.add_argument('--out', type=str, default='results', help='Output directory for the bundle (Default results)')
    run.add_argument('--seed', type=int, default=None, help='Master seed, a 64-bit unsigned integer')
    run.add_argument('--setting', type=str, default=None, choices=SETTING_CHOICES, help='Which system(s) to simulate')
    run.add_argument('--months', type=int, default=None, help='Simulated months per run (Default 120)')
    run.add_argument('--replicates', type=int, default=None, help='Number of independent replicates')
    run.add_argument('--workers', type=int, default=None, help='Maximum number of worker threads running replicates')

    # Current System args
    run.add_argument('--max-rejections', type=int, default=None, help='Rejections before a CS author abandons (Default 5)')

    # Alternative System args
    run.add_argument('--bid-rounds', type=int, default=None, help='Bidding rounds before an AS author abandons (Default 1)')
    run.add_argument('--duty-strategy', type=str, default=None, choices=DUTY_STRATEGIES, help='How AS authors pick manuscripts to review')

    # Shared
    run.add_argument('--reviewer-ranking', type=str, default=None, choices=RANKINGS, help='Referee expertise score direction')

    # debugging
    run.add_argument('--debug', action='store_true', default=False, help='Enable debug logging')
    run.add_argument('--quiet', action='store_true', default=False, help='Hide progress bars')

    return parser.parse_args(argv)


def overrides_from(args) -> dict:
    """CLI flags mapped onto config keys; unset flags are None and do not override."""
    return {
        "master_seed": args.seed,
        "settings": args.setting,
        "months": args.months,
        "replicates": args.replicates,
        "workers": args.workers,
        "max_rejections": args.max_rejections,
        "as_bid_rounds": args.bid_rounds,
        "as_duty_strategy": args.duty_strategy,
        "reviewer_ranking": args.reviewer_ranking,
    }


def main(argv=None):
    args = parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    logger.debug(f"All arguments: {vars(args)}")

    try:
        cfg = parse_config(args.config, overrides_from(args))
        logger.info(f"Seed {cfg.master_seed}, settings {cfg.settings}, {cfg.months} months, "
                    f"{cfg.replicates} replicate(s)")
        start_time = time.time()
        bundle = run_experiment(cfg, args.out, progress=not args.quiet and sys.stderr.isatty())
    except ConfigError as e:
        logger.error(f"❌ Invalid configuration: {e}")
        return 1
    except OSError as e:
        logger.error(f"❌ I/O error on {e.filename or args.out}: {e.strerror or e}")
        return 1
    except ValueError as e:
        logger.error(f"❌ {e}")
        return 1

    elapsed_time = time.time() - start_time
    logger.info(f"Simulation completed in {elapsed_time:.2f} seconds")
    logger.info(f"Output saved to: {bundle.root} ({len(bundle.paths)} files)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

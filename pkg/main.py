import argparse
import os
import sys
import time

from api_server import APIServer
from batch_runner import BatchRunner
from controllers import CONTROLLER_KINDS
from errors import ConfigError
from json_logging import log_json, setup_logging

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dqhinf', description='Dual-quaternion H-infinity kinematic control simulations')
    parser.add_argument('--list-controllers', action='store_true', help='print the controller kinds and exit')
    sub = parser.add_subparsers(dest='command')

    run_p = sub.add_parser('run', help='run scenario configs and write CSV traces')
    run_p.add_argument('--config', action='append', required=True, metavar='PATH',
                       help='scenario config file (repeatable)')
    run_p.add_argument('--out', default=os.getenv('RESULTS_DIR', 'results'), metavar='DIR')
    run_p.add_argument('--seed', type=int, default=None, help='overrides [sim] seed')
    run_p.add_argument('--sqrt-ratio', action='store_true',
                       help='report the square root of the attenuation ratios')
    run_p.add_argument('--workers', type=int, default=None)

    serve_p = sub.add_parser('serve', help='serve the HTTP API')
    serve_p.add_argument('--host', default=os.getenv('API_HOST', '0.0.0.0'))
    serve_p.add_argument('--port', type=int, default=int(os.getenv('API_PORT', '9900')))
    serve_p.add_argument('--sqrt-ratio', action='store_true')
    return parser


def cmd_run(args) -> int:
    runner = BatchRunner(results_dir=args.out, workers=args.workers, sqrt_ratio=args.sqrt_ratio)
    try:
        results = runner.run_config_files(args.config, out_dir=args.out, seed=args.seed)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_CONFIG

    for r in results:
        print(r['message'])
    if all(r['success'] and r['passed'] for r in results):
        return EXIT_OK
    return EXIT_FAILED


def cmd_serve(args) -> int:
    runner = BatchRunner(sqrt_ratio=args.sqrt_ratio)
    api_server = APIServer(port=args.port, host=args.host)
    api_server.set_batch_runner(runner)
    api_server.run_in_thread()

    while True:
        try:
            time.sleep(1)
        except KeyboardInterrupt:
            log_json("info", "Shutting down gracefully",
                event_type="graceful_shutdown"
            )
            return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()

    if args.list_controllers:
        for kind in CONTROLLER_KINDS:
            print(kind)
        return EXIT_OK
    if args.command == 'run':
        return cmd_run(args)
    if args.command == 'serve':
        return cmd_serve(args)
    parser.print_help()
    return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())

"""
Главный файл для запуска конвейера
"""

import logging
import sys
from typing import List, Optional

from app.cli import COMMANDS, build_parser, config_overrides
from app.config import get_config
from app.exceptions import PipelineError

# Настройка логирования
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=logging.INFO
)
logger = logging.getLogger(__name__)

EXIT_FATAL = 2


def main(argv: Optional[List[str]] = None) -> int:
    """Разбор аргументов, запуск команды, код завершения"""
    args = build_parser().parse_args(argv)

    try:
        config = get_config(args.config, **config_overrides(args))
        logging.getLogger().setLevel(config.log_level.upper())
        logger.info("Конфигурация загружена")
        result = COMMANDS[args.command](config)
    except PipelineError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FATAL

    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

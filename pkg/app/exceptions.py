"""
Исключения конвейера
"""

from typing import Sequence


class PipelineError(Exception):
    """Базовое исключение конвейера"""

    fatal: bool = False


class ConfigurationError(PipelineError):
    """Ошибка конфигурации"""

    fatal = True


class DatasetError(PipelineError):
    """Набор данных не читается или не разбирается"""

    fatal = True


class SchemaVersionError(DatasetError):
    """Неподдерживаемая версия схемы набора данных"""

    def __init__(self, expected: str, found: object):
        self.expected = expected
        self.found = found
        super().__init__(
            f"Unsupported schema_version: expected {expected!r}, found {found!r}"
        )


class MissingArtifactError(PipelineError):
    """Нет входного файла стадии"""

    fatal = True


class GitCommandError(PipelineError):
    """Команда git завершилась с ошибкой"""

    def __init__(self, argv: Sequence[str], returncode: int, stderr: str):
        self.argv = list(argv)
        self.returncode = returncode
        self.stderr = stderr
        super().__init__(
            f"git command failed ({returncode}): {' '.join(self.argv)}: {stderr.strip()}"
        )


class ChangeUnresolvableError(PipelineError):
    """Изменение нельзя разрешить в клоне (CHANGE_UNRESOLVABLE)"""


class FileNotAtRevisionError(PipelineError):
    """Файл отсутствует в указанной ревизии"""

    def __init__(self, revision: str, file_path: str):
        self.revision = revision
        self.file_path = file_path
        super().__init__(f"{file_path} is absent at {revision}")


class EmptyCohortError(ValueError):
    """Пустая когорта для оценки Каплана-Мейера"""

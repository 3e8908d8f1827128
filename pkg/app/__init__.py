"""
Инструментарий для анализа влияния ChatGPT на изменения кода и живучести строк
"""

__version__ = "1.0.0"

"""
Пакет тестов chatlineage
"""

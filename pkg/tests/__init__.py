# tests/__init__.py
"""
Test suite for cm-scope.

Synthetic firmware is assembled on the fly by ``tests.asm`` and
``tests.firmware``; no binary fixtures are checked in.
"""

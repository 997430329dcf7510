#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Legacy shim; all metadata lives in pyproject.toml."""

from setuptools import setup

setup()

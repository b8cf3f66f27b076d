#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
from setvalued.version import __version__  # noqa: F401

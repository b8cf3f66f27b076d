#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-

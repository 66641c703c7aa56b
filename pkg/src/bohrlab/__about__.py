# SPDX-FileCopyrightText: 2026-present The bohrlab Authors
#
# SPDX-License-Identifier: Apache-2.0
__version__ = "0.1.0"

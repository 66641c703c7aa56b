# SPDX-FileCopyrightText: 2026-present The bohrlab Authors
#
# SPDX-License-Identifier: Apache-2.0

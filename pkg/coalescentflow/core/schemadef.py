# -*- coding: utf-8 -*-
"""
===============================================================================

   CoalescentFlow:
   Toolkit to run convergence experiments on the typed Kingman coalescent.

   Copyright (c) 2026, CoalescentFlow contributors. All rights reserved.

   Redistribution and use of this code in source and binary forms, with
   or without modification, are permitted provided that the following
   conditions are met:
   * Redistributions of source code must retain the above copyright notice,
     this list of conditions and the following disclaimer.
   * Redistributions in binary form must reproduce the above copyright notice,
     this list of conditions and the following disclaimer in the documentation
     and/or other materials provided with the distribution.

   THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
   "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED
   TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR
   PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR
   CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL,
   EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO,
   PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS;
   OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY,
   WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR
   OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SAMPLE CODE, EVEN IF
   ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.

===============================================================================
"""

import os
from typing import Any, Iterable, List, Sequence

import pandas as pd


class DataType(object):
    """
    List of available Data Types of CSV columns.
    """
    Integer = 0
    Float = 2
    String = 4

    @staticmethod
    def pandas_type(data_type: "DataType") -> str:
        """
        Returns the pandas dtype of the specified DataType.
        """
        if data_type == DataType.Integer:
            return 'int64'
        if data_type == DataType.Float:
            return 'float64'

        return 'object'


class FieldDef:
    """
    Provides metadata information of a column of an output table.
    """
    def __init__(self, name: str, data_type: DataType = DataType.Float, description: str = ''):
        self.name = name
        self.type = data_type
        self.description = description

    def __str__(self) -> str:
        """
        Returns the String representation of this Object.
        """
        return 'Name = {}, DataType = {}'.format(self.name, self.type)


class SchemaDef:
    """
    Provides metadata information of an output table: its file name and its fixed
    column order.
    """
    def __init__(self, name: str, fields: Iterable[FieldDef]):
        self.name = name
        self.fields: List[FieldDef] = list(fields)

    def columns(self) -> List[str]:
        return [fd.name for fd in self.fields]

    def file_name(self) -> str:
        return self.name + '.csv'

    def to_frame(self, rows: Sequence[Sequence[Any]]) -> pd.DataFrame:
        """
        Returns the DataFrame of the specified rows, one value per column in order.
        """
        frame = pd.DataFrame(list(rows), columns=self.columns())
        for fd in self.fields:
            if len(frame):
                frame[fd.name] = frame[fd.name].astype(DataType.pandas_type(fd.type))

        return frame

    def write_csv(self, folder: str, rows: Sequence[Sequence[Any]]) -> str:
        """
        Writes the rows as a CSV file (RFC-4180 minimal quoting, '.' decimals, '\\n' line
        ends) and returns its path.
        """
        file_name = os.path.join(folder, self.file_name())
        self.to_frame(rows).to_csv(file_name, index=False, lineterminator='\n')
        return file_name

    @staticmethod
    def matrix_fields(prefix: str, dimension: int) -> List[FieldDef]:
        """
        Returns the columns prefix_11 .. prefix_dd of a d x d integer matrix (1-based types).
        """
        return [
            FieldDef('{}_{}{}'.format(prefix, i + 1, j + 1), DataType.Integer)
            for i in range(dimension) for j in range(dimension)
        ]

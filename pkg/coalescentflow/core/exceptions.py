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

from typing import Optional


class CoalescentFlowError(Exception):
    """
    Base class of the errors raised by CoalescentFlow. The exit code is the one the
    console application returns when the error escapes an experiment.
    """
    exit_code = 3

    def __init__(self, message: str, field: Optional[str] = None):
        Exception.__init__(self, message)
        self.field = field

    def as_dict(self) -> dict:
        """
        Returns the machine-readable description of this error.
        """
        return {
            'status': 'ERROR',
            'code': self.exit_code,
            'error': self.__class__.__name__,
            'field': self.field,
            'message': str(self)
        }


class ConfigError(CoalescentFlowError):
    """
    The experiment configuration is malformed; 'field' names the offending key path.
    """
    exit_code = 2


class ModelError(CoalescentFlowError):
    """
    The mutation model violates one of its invariants.
    """
    pass


class NotPimError(ModelError):
    """
    The operation requires parent independent mutations.
    """
    pass


class ReducibleMatrixError(ModelError):
    """
    The mutation probability matrix is not irreducible.
    """
    pass


class DomainError(CoalescentFlowError):
    """
    An input lies outside the domain of the operation.
    """
    pass


class DegenerateKernelError(DomainError):
    """
    The forward kernel was asked for a single-individual configuration.
    """
    pass


class InvalidSupportError(CoalescentFlowError):
    """
    The proposal law does not dominate the target law (Q_j = 0 while m_ij > 0).
    """
    pass


class OracleMissingError(CoalescentFlowError):
    """
    No sampling probability oracle is available for a parent dependent model.
    """
    pass


class InsufficientSampleError(CoalescentFlowError):
    """
    Too few samples to run a goodness-of-fit test.
    """
    pass


class BudgetError(CoalescentFlowError):
    """
    An enumeration, dynamic program or grid exceeded its configured budget.
    """
    pass

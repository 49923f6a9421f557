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

import copy
import json
import logging
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from coalescentflow.core.common import JsonUtils
from coalescentflow.core.enumerations import RMode
from coalescentflow.core.exceptions import ConfigError, ModelError
from coalescentflow.core.jsoncomments import JsonComments
from coalescentflow.coalescent.mutationmodel import MutationModel, is_irreducible
from coalescentflow.coalescent.testfunctions import BumpTestFunction, make_test_function

# Names of the experiments, one per subcommand of the console application.
EXPERIMENT_NAMES = [
    'simulate-backward', 'simulate-forward', 'gof', 'path-dev',
    'generator-gap', 'semigroup-gap', 'lr-check', 'asymptotics'
]

_PROBABILITIES = {'type': 'array', 'minItems': 1, 'items': {'type': 'number', 'minimum': 0, 'maximum': 1}}

CONFIG_SCHEMA = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    'title': 'CoalescentFlow experiment',
    'type': 'object',
    'additionalProperties': False,
    'required': ['model'],
    'properties': {
        'experiment': {'type': 'string', 'enum': EXPERIMENT_NAMES},
        'model': {
            'type': 'object',
            'additionalProperties': False,
            'required': ['theta'],
            'properties': {
                'theta': {'type': 'number', 'exclusiveMinimum': 0},
                'matrix': {'type': 'array', 'minItems': 1, 'items': _PROBABILITIES},
                'q': _PROBABILITIES,
                'proposal_q': _PROBABILITIES
            }
        },
        'y0': {'type': 'array', 'minItems': 1, 'items': {'type': 'number', 'exclusiveMinimum': 0}},
        'n_values': {'type': 'array', 'minItems': 1, 'items': {'type': 'integer', 'minimum': 1}},
        't_values': {'type': 'array', 'minItems': 1, 'items': {'type': 'number', 'minimum': 0}},
        'paths': {'type': 'integer', 'minimum': 1},
        'seed': {'type': 'integer', 'minimum': 0, 'maximum': 18446744073709551615},
        'r_mode': {'type': 'string', 'enum': [mode.value for mode in RMode]},
        'threads': {'type': 'integer', 'minimum': 1},
        'output': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {'dir': {'type': 'string', 'minLength': 1}}
        },
        'test_function': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'delta': {'type': 'number', 'exclusiveMinimum': 0},
                'radius': {'type': 'number', 'exclusiveMinimum': 0},
                'm_cap': {'type': 'integer', 'minimum': 1}
            }
        },
        'tolerances': {'type': 'object', 'additionalProperties': {'type': 'number', 'exclusiveMinimum': 0}},
        'parameters': {'type': 'object'}
    }
}

# Defaults shared by all experiments.
GLOBAL_DEFAULTS = {
    'seed': 0,
    'threads': 1,
    'paths': 1000,
    'n_values': [100],
    't_values': [0.5],
    'output': {'dir': 'results'},
    'test_function': {'delta': 0.15, 'radius': 3.0, 'm_cap': 3},
    'tolerances': {},
    'parameters': {}
}

# Keys that change how a run is executed but not what it computes.
EXECUTION_KEYS = ('threads', 'output')


def _error_field(error) -> Optional[str]:
    """
    Returns the dotted key path named by a jsonschema validation error.
    """
    path = [str(p) for p in error.absolute_path]

    if error.validator == 'required' and isinstance(error.instance, dict):
        missing = [name for name in error.validator_value if name not in error.instance]
        path += missing[:1]
    elif error.validator == 'additionalProperties' and isinstance(error.instance, dict):
        known = error.schema.get('properties', {})
        extras = sorted(name for name in error.instance if name not in known)
        path += extras[:1]

    return '.'.join(path) if path else None


def merge_defaults(document: Dict[str, Any], defaults: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Fills in the missing keys of the document (nested objects included) from 'defaults'.
    """
    for key, value in defaults.items():
        if key not in document:
            document[key] = copy.deepcopy(value)
        elif isinstance(value, dict) and isinstance(document[key], dict):
            merge_defaults(document[key], value)

    return document


class ExperimentConfig:
    """
    Validated experiment configuration with defaults filled in.
    """
    def __init__(self, document: Dict[str, Any]):
        self.document = document
        self._model: Optional[MutationModel] = None

    @staticmethod
    def parse_text(text: str, source: str = '<config>') -> Dict[str, Any]:
        """
        Returns the JSON document of the specified config text (comments allowed).
        """
        try:
            document = json.loads(JsonComments.remove_comments(text.splitlines()))
        except ValueError as e:
            raise ConfigError('Malformed JSON in "{}": {}'.format(source, str(e)))

        if not isinstance(document, dict):
            raise ConfigError('The config "{}" must be a JSON object.'.format(source))

        return document

    @staticmethod
    def load_document(file_name: str) -> Dict[str, Any]:
        """
        Reads the JSON document of the specified config file.
        """
        try:
            with open(file_name, 'r', encoding='utf-8') as fp:
                text = fp.read()
        except OSError as e:
            raise ConfigError('Config file "{}" can not be read: {}'.format(file_name, e.strerror), field='config')

        return ExperimentConfig.parse_text(text, file_name)

    @staticmethod
    def validate(document: Dict[str, Any]) -> None:
        """
        Raises a ConfigError naming the offending key path of the first schema violation.
        """
        validator = Draft7Validator(CONFIG_SCHEMA)
        error = best_match(validator.iter_errors(document))

        if error is not None:
            field = _error_field(error)
            raise ConfigError('Invalid config value at "{}": {}'.format(field or '<root>', error.message), field=field)

        pass

    @staticmethod
    def build(document: Dict[str, Any],
              tolerances: Optional[Mapping[str, float]] = None,
              parameters: Optional[Mapping[str, Any]] = None) -> "ExperimentConfig":
        """
        Validates the document, fills in the global and experiment defaults and returns
        the resulting config. The input document is not modified.
        """
        document = copy.deepcopy(document)
        ExperimentConfig.validate(document)

        defaults = copy.deepcopy(GLOBAL_DEFAULTS)
        defaults['tolerances'] = dict(tolerances or {})
        defaults['parameters'] = dict(parameters or {})
        merge_defaults(document, defaults)

        config = ExperimentConfig(document)
        model = config.model()

        if 'r_mode' not in document:
            proposal = config.proposal_model()
            exact = model.is_pim and (proposal is None or proposal.is_pim)
            document['r_mode'] = RMode.EXACT.value if exact else RMode.ASYMPTOTIC.value

        config.check()
        return config

    def check(self) -> None:
        """
        Raises a ConfigError on the semantic errors the schema can not express.
        """
        d = self.model().dimension
        document = self.document

        proposal_q = document['model'].get('proposal_q')
        if proposal_q is not None:
            if len(proposal_q) != d:
                raise ConfigError('The proposal row has {} entries, the model has {} types.'.format(len(proposal_q), d),
                                  field='model.proposal_q')
            if min(proposal_q) <= 0 or abs(sum(proposal_q) - 1.0) > 1e-12:
                raise ConfigError('The proposal row must be a strictly positive probability vector.',
                                  field='model.proposal_q')

        if 'y0' in document and len(document['y0']) != d:
            raise ConfigError('y0 has {} entries, the model has {} types.'.format(len(document['y0']), d), field='y0')

        tf = document['test_function']
        if tf['radius'] <= 2.0 * tf['delta'] * d:
            raise ConfigError('The test function needs radius > 2 delta d ({} <= {}).'.format(tf['radius'], 2.0 * tf['delta'] * d),
                              field='test_function.radius')

        pass

    def model(self) -> MutationModel:
        """
        Returns the mutation model of the config, 'q' for a PIM model or 'matrix' for any.
        """
        if self._model is not None:
            return self._model

        section = self.document['model']
        has_matrix, has_q = 'matrix' in section, 'q' in section

        if has_matrix == has_q:
            raise ConfigError('The model needs exactly one of "matrix" or "q".', field='model')

        field = 'model.q' if has_q else 'model.matrix'
        try:
            if has_q:
                model = MutationModel.from_pim(section['theta'], section['q'])
            else:
                model = MutationModel(section['theta'], section['matrix'])
            model.check()
        except (ModelError, ValueError) as e:
            raise ConfigError(str(e), field=field)

        if not model.is_pim and not is_irreducible(model):
            raise ConfigError('The mutation matrix is not irreducible.', field=field)

        self._model = model
        return model

    def proposal_model(self) -> Optional[MutationModel]:
        """
        Returns the PIM proposal model (same theta, row 'proposal_q'), if any.
        """
        proposal_q = self.document['model'].get('proposal_q')
        if proposal_q is None:
            return None

        return MutationModel.from_pim(self.document['model']['theta'], proposal_q)

    @property
    def experiment(self) -> str:
        return self.document.get('experiment', '')

    @property
    def seed(self) -> int:
        return int(self.document['seed'])

    @property
    def threads(self) -> int:
        return int(self.document['threads'])

    @property
    def paths(self) -> int:
        return int(self.document['paths'])

    @property
    def n_values(self) -> List[int]:
        return [int(n) for n in self.document['n_values']]

    @property
    def t_values(self) -> List[float]:
        return [float(t) for t in self.document['t_values']]

    @property
    def r_mode(self) -> RMode:
        return RMode(self.document['r_mode'])

    @property
    def output_dir(self) -> str:
        return self.document['output']['dir']

    @property
    def tolerances(self) -> Dict[str, float]:
        return self.document['tolerances']

    @property
    def parameters(self) -> Dict[str, Any]:
        return self.document['parameters']

    def tolerance(self, name: str) -> float:
        if name not in self.tolerances:
            raise ConfigError('Missing tolerance "{}".'.format(name), field='tolerances.' + name)

        return float(self.tolerances[name])

    def y0(self) -> np.ndarray:
        """
        Returns the initial point of the experiment.
        """
        if 'y0' not in self.document:
            raise ConfigError('The experiment "{}" needs an initial point.'.format(self.experiment), field='y0')

        return np.array(self.document['y0'], dtype=float)

    def test_function(self) -> BumpTestFunction:
        section = self.document['test_function']
        return make_test_function(section['delta'], section['radius'], section['m_cap'], self.model().dimension)

    def canonical(self) -> str:
        """
        Returns the canonical text of the full config.
        """
        return JsonUtils.canonical_dumps(self.document)

    def echo(self) -> Dict[str, Any]:
        """
        Returns the config without the execution-only keys, the part that determines
        the artifacts of a run.
        """
        echo = copy.deepcopy(self.document)
        for key in EXECUTION_KEYS:
            echo.pop(key, None)

        logging.debug('Config echo: {}'.format(json.dumps(echo, sort_keys=True)))
        return echo

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
import logging
import importlib
import inspect
import pkgutil
from typing import Dict, Iterable, Iterator, Type


class ModuleManager:
    """
    Registry of the concrete classes deriving from 'abstract_types' that are deployed as
    modules of a package folder, keyed by lower-case class name.
    """
    def __init__(self, abstract_types=()):
        self.abstract_types = abstract_types
        self.modules: Dict[str, Type] = dict()

    @staticmethod
    def package_name(modules_folder: str) -> str:
        """
        Returns the dotted package name of a folder of this application.
        """
        root_folder = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
        relative_path = os.path.relpath(os.path.abspath(modules_folder), root_folder)
        return '.'.join(part for part in relative_path.replace('\\', '/').split('/') if part)

    def concrete_types(self, module_def) -> Iterator[Type]:
        for _, type_def in inspect.getmembers(module_def, inspect.isclass):
            if type_def in self.abstract_types or not issubclass(type_def, self.abstract_types):
                continue
            if type_def.__module__ != module_def.__name__ or inspect.isabstract(type_def):
                continue
            if hasattr(type_def, 'is_available') and not type_def.is_available():
                continue

            yield type_def

    def load_modules(self, modules_folders: Iterable[str] = ()) -> Dict[str, Type]:
        """
        Load the modules deployed in the specified folders.
        """
        self.modules.clear()
        return self.append_modules(modules_folders)

    def append_modules(self, modules_folders: Iterable[str] = ()) -> Dict[str, Type]:
        """
        Adds the modules deployed in the specified folders. A module failing to import
        is logged and skipped.
        """
        for modules_folder in modules_folders:
            if not os.path.isdir(modules_folder):
                logging.error('The specified modules folder "{}" does not exist!'.format(modules_folder))
                continue

            package_name = ModuleManager.package_name(modules_folder)

            for module_info in sorted(pkgutil.iter_modules([modules_folder]), key=lambda info: info.name):
                if module_info.ispkg:
                    continue
                try:
                    module_def = importlib.import_module(package_name + '.' + module_info.name)
                except Exception as e:
                    logging.error('Fail loading the dynamic module "{}". {}'.format(module_info.name, str(e)))
                    continue

                for type_def in self.concrete_types(module_def):
                    key = type_def.__name__.lower()
                    if key in self.modules and self.modules[key] is not type_def:
                        logging.warning('The module "{}" replaces a previous one of the same name.'.format(key))

                    self.modules[key] = type_def

        return self.modules

# -*- coding: utf-8 -*-
#
# Lifpath documentation build configuration file.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

needs_sphinx = '1.4'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.todo',
]

templates_path = ['_templates']
source_suffix = ['.rst']
master_doc = 'index'

autodoc_default_flags = ['members', 'show-inheritance']

project = 'Lifpath'
copyright = '2026, Hadron Industries'
author = 'Sam Hartman'
version = '0.1'
release = version

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
default_role = 'any'
pygments_style = 'sphinx'
todo_include_todos = True

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_show_sourcelink = False
html_copy_sources = False
htmlhelp_basename = 'lifpath'

latex_documents = [
    (master_doc, 'lifpath.tex', 'Lifpath Documentation', author, 'manual'),
]

man_pages = [
    (master_doc, 'lifpath', 'Lifpath Documentation', [author], 1),
]

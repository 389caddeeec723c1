from .scenario_cli import entry

entry()

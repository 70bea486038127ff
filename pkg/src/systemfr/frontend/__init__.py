from .stdlib import CoreDef, load_core, natop, stdlib

__all__ = ["CoreDef", "load_core", "natop", "stdlib"]

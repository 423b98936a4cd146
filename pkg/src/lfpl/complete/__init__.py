from .build import Closed, fin, fin_term, lfpl, mt
from .encode import divmod_term, encode_function, encode_value, inhabitants
from .iterate import counting_step, iter_poly, iter_sharp
from .stacks import (
    StackImpl, check_stack, m_den, m_value, stack_add, stack_const, stack_inductive,
    stack_monomial, stack_poly, stack_weaken,
)
from .stdlib import stdlib
from .tm import (
    CompiledTM, TmSpec, TmSpecError, budget_poly, compile_tm, compile_tm_listout,
    parse_tm, run_listout, simulate,
)

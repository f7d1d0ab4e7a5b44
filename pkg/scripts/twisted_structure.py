"""Twisted classes, H1, norm fibers and the inner-form check for the catalogue models.

    python scripts/twisted_structure.py
"""
from torsionforge import basechange as bc
from torsionforge.corpus import TTF_MODELS, twisted_model

print("model\torder\tp\ttwisted_classes\th1\tnorm_fibers_ok")
for name in TTF_MODELS:
    T = twisted_model(name)
    if T.order > 1000:
        continue
    rep = bc.twisted_classes(T)
    fibers_ok = all(f.twisted_class_count == f.h1_of_centralizer for f in bc.norm_fibers(T))
    print(f"{name}\t{T.order}\t{T.p}\t{len(rep.classes)}\t{rep.h1_size}\t{fibers_ok}")

checked, failures = bc.inner_form_check(bc.sl2_frobenius(3))
print(f"# SL2(F9)/Frobenius, regular semisimple norms: {checked} checked, {len(failures)} mismatches")

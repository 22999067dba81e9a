from .generator import anchor_real_only, generate_anchor, split_anchor_source, stratified_indices

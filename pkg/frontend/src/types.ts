/** API payload schemas. Every rendered fact is parsed out of one of these;
 * anything the service did not send is rejected, never invented. */

import { z } from "zod";

export const statementSchema = z.object({
  statement_id: z.string(),
  predicate: z.string(),
  value: z.string(),
  ontologized: z.boolean(),
  source: z.string(),
  score: z.number(),
});

export const statementWithFlagSchema = statementSchema.extend({
  deleted: z.boolean(),
});

export const createdAssaySchema = z.object({
  assay_uid: z.string(),
  statements: z.array(statementSchema),
});

export const assayDetailSchema = z.object({
  assay_uid: z.string(),
  text: z.string(),
  statements: z.array(statementWithFlagSchema),
  created: z.string(),
  updated: z.string(),
});

export const assaySummarySchema = z.object({
  assay_uid: z.string(),
  created: z.string(),
  n_statements: z.number(),
});

export const assayListSchema = z.object({
  assays: z.array(assaySummarySchema),
});

export const healthSchema = z.object({
  status: z.string(),
  model_loaded: z.boolean(),
});

export const deleteResultSchema = z.object({
  remaining: z.number(),
});

export type Statement = z.infer<typeof statementSchema>;
export type StatementWithFlag = z.infer<typeof statementWithFlagSchema>;
export type CreatedAssay = z.infer<typeof createdAssaySchema>;
export type AssayDetail = z.infer<typeof assayDetailSchema>;
export type AssaySummary = z.infer<typeof assaySummarySchema>;
export type Health = z.infer<typeof healthSchema>;
